#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "frak/parallel.hpp"

namespace frak::cli {

namespace fs = std::filesystem;

CliConfig::CliConfig() : threads(default_threads()) {}

EncoderConfig CliConfig::encoder_config() const { return encoder_config(mode); }

EncoderConfig CliConfig::encoder_config(SMode m) const {
    EncoderConfig c;
    c.thresholds = (m == SMode::baseline && baseline_thresholds) ? *baseline_thresholds : thresholds;
    c.pool.strides = strides;
    c.pool.pool_caps.fill(dn);
    c.policy = SPolicy::for_mode(m);
    for (int level = 0; level < kLevels; ++level) {
        if (s_sets[static_cast<std::size_t>(level)]) {
            c.policy.sets[static_cast<std::size_t>(level)] = *s_sets[static_cast<std::size_t>(level)];
        }
    }
    c.threads = threads;
    c.settle_passes = settle_passes;
    c.settle_rounds = settle_rounds;
    c.settle_fraction = settle_fraction;
    c.settle_min_fixes = settle_min_fixes;
    return c;
}

DecodeOptions CliConfig::decode_options() const {
    DecodeOptions d;
    d.iterations = iterations;
    d.tolerance = tolerance;
    d.threads = threads;
    return d;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
    throw Error(ErrorCode::invalid_config, "bad value '" + std::string(value) + "' for " + std::string(key));
}

template <class T> T parse_number(std::string_view key, std::string_view text) {
    text = trim(text);
    T v{};
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
        bad_value(key, text);
    }
    return v;
}

template <class T> std::vector<T> parse_list(std::string_view key, std::string_view text) {
    std::vector<T> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
        out.push_back(parse_number<T>(key, text.substr(pos, end - pos)));
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

template <class T, std::size_t N> std::array<T, N> parse_fixed(std::string_view key, std::string_view text) {
    const auto list = parse_list<T>(key, text);
    if (list.size() != N) {
        throw Error(ErrorCode::invalid_config,
                    std::string(key) + " needs " + std::to_string(N) + " comma-separated values");
    }
    std::array<T, N> out{};
    std::copy(list.begin(), list.end(), out.begin());
    return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
    text = trim(text);
    if (text == "1" || text == "true" || text == "yes" || text == "on") {
        return true;
    }
    if (text == "0" || text == "false" || text == "no" || text == "off") {
        return false;
    }
    bad_value(key, text);
}

int parse_count(std::string_view key, std::string_view text) {
    const int v = parse_number<int>(key, text);
    if (v < 0) {
        bad_value(key, text);
    }
    return v;
}

} // namespace

void apply_setting(CliConfig &config, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "mode") {
        config.mode = parse_mode(value);
    } else if (key == "dn") {
        config.dn = parse_number<int>(key, value);
        if (config.dn < 1) {
            bad_value(key, value);
        }
    } else if (key == "strides") {
        config.strides = parse_fixed<int, kLevels>(key, value);
    } else if (key == "thresholds") {
        config.thresholds = parse_fixed<double, 3>(key, value);
    } else if (key == "baseline_thresholds") {
        config.baseline_thresholds = parse_fixed<double, 3>(key, value);
    } else if (key.size() == 2 && key[0] == 's' && key[1] >= '1' && key[1] <= '4') {
        config.s_sets[static_cast<std::size_t>(key[1] - '1')] = parse_list<double>(key, value);
    } else if (key == "settle_passes") {
        config.settle_passes = parse_count(key, value);
    } else if (key == "settle_rounds") {
        config.settle_rounds = parse_count(key, value);
    } else if (key == "settle_min_fixes") {
        config.settle_min_fixes = parse_count(key, value);
    } else if (key == "settle_fraction") {
        config.settle_fraction = parse_number<double>(key, value);
        if (!(config.settle_fraction > 0.0 && config.settle_fraction <= 1.0)) {
            bad_value(key, value);
        }
    } else if (key == "iterations") {
        config.iterations = parse_number<int>(key, value);
        if (config.iterations < 1) {
            bad_value(key, value);
        }
    } else if (key == "tolerance") {
        config.tolerance = parse_number<int>(key, value);
        if (config.tolerance < 0) {
            bad_value(key, value);
        }
    } else if (key == "threads") {
        config.threads = parse_number<int>(key, value);
        if (config.threads < 1) {
            bad_value(key, value);
        }
    } else if (key == "crop") {
        config.crop = parse_bool(key, value);
    } else if (key == "pool_sizes") {
        config.pool_sizes = parse_list<int>(key, value);
        if (std::any_of(config.pool_sizes.begin(), config.pool_sizes.end(), [](int v) { return v < 1; })) {
            bad_value(key, value);
        }
    } else if (key == "output_dir") {
        config.output_dir = std::string(value);
    } else {
        throw Error(ErrorCode::invalid_config, "unknown setting '" + std::string(key) + "'");
    }
}

void apply_config_file(CliConfig &config, const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::io_failure, "cannot read config " + path.string());
    }
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view text = line;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) {
            text = text.substr(0, hash);
        }
        text = trim(text);
        if (text.empty()) {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::invalid_config,
                        path.string() + ":" + std::to_string(number) + ": expected key=value");
        }
        apply_setting(config, text.substr(0, eq), text.substr(eq + 1));
    }
}

namespace {

int exit_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::io_failure:
        return exit_io;
    case ErrorCode::invalid_config:
        return exit_usage;
    default:
        return exit_data;
    }
}

std::vector<std::uint8_t> read_bytes(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io_failure, "cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path &path, const std::vector<std::uint8_t> &bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(ErrorCode::io_failure, "cannot write " + path.string());
    }
}

GrayImage load_input(const fs::path &path, const CliConfig &config) {
    GrayImage image = load_pgm(path);
    if (config.crop) {
        image = center_crop_to_multiple(image, range_side(1));
    }
    return image;
}

std::string list_text(const std::vector<double> &v) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s << (i ? "," : "") << v[i];
    }
    return s.str();
}

class Report {
  public:
    explicit Report(std::ostream &out) : out_(out) {}

    template <class T> Report &operator()(std::string_view key, const T &value) {
        out_ << key << '=' << value << '\n';
        return *this;
    }
    Report &operator()(std::string_view key, double value) {
        out_ << key << '=' << std::setprecision(10) << value << '\n';
        return *this;
    }

  private:
    std::ostream &out_;
};

void print_encode_report(std::ostream &out, const EncodeResult &r) {
    Report kv(out);
    const StreamHeader &h = r.stream.header;
    kv("width", h.width)("height", h.height)("mode", to_string(h.mode));
    kv("dn", h.level(1).origins.size());
    for (int s = 1; s <= kLevels; ++s) {
        kv("step" + std::to_string(s) + "_blocks", r.report.step_blocks[static_cast<std::size_t>(s - 1)]);
    }
    kv("records", r.stream.records.size());
    kv("collage_ssd", r.report.collage_ssd);
    kv("payload_bits", r.report.payload_bits)("header_bits", r.report.header_bits);
    kv("bpp_payload", r.report.bpp_payload)("bpp_total", r.report.bpp_total);
    kv("ratio_payload", r.report.ratio_payload)("ratio_total", r.report.ratio_total);
    kv("settled", r.report.settled ? 1 : 0)("settle_rounds", r.report.settle_rounds);
    kv("settled_records", r.report.settled_records)("settle_time_s", r.report.settle_seconds);
    kv("pool_time_s", r.report.pool_seconds)("encode_time_s", r.report.encode_seconds);
}

int cmd_encode(const CliConfig &config, const std::string &input, const std::string &output, std::ostream &out) {
    const GrayImage image = load_input(input, config);
    const EncodeResult result = encode(image, config.encoder_config());
    write_bytes(output, serialize(result.stream));
    print_encode_report(out, result);
    return exit_ok;
}

int cmd_decode(const CliConfig &config, const std::string &input, const std::string &output, std::ostream &out) {
    const CompressedStream stream = deserialize(read_bytes(input));
    const DecodeResult result = decode_detailed(stream, config.decode_options());
    save_pgm(result.image, output);
    Report kv(out);
    kv("width", result.image.width())("height", result.image.height());
    kv("iterations", result.iterations)("final_change", result.final_change());
    kv("converged", result.final_change() <= config.tolerance ? 1 : 0);
    kv("decode_time_s", result.decode_seconds);
    return exit_ok;
}

int cmd_inspect(const std::string &input, std::ostream &out) {
    const auto bytes = read_bytes(input);
    const CompressedStream stream = deserialize(bytes);
    const StreamHeader &h = stream.header;
    Report kv(out);
    kv("magic", "FRAK")("version", static_cast<int>(kStreamVersion));
    kv("width", h.width)("height", h.height)("mode", to_string(h.mode));
    std::array<long, kLevels> counts{};
    for (const MatchRecord &r : stream.records) {
        ++counts[static_cast<std::size_t>(r.step - 1)];
    }
    for (int s = 1; s <= kLevels; ++s) {
        const LevelHeader &lv = h.level(s);
        const std::string p = "level" + std::to_string(s) + "_";
        kv(p + "range_side", range_side(s))(p + "stride", lv.stride)(p + "pool_size", lv.origins.size());
        kv(p + "address_bits", address_bits(lv.origins.size()))(p + "s_bits", s_index_bits(lv.s_values.size()));
        kv(p + "s_values", list_text(lv.s_values));
        kv(p + "record_bits", record_bits(h, s));
    }
    for (int s = 1; s <= kLevels; ++s) {
        kv("step" + std::to_string(s) + "_records", counts[static_cast<std::size_t>(s - 1)]);
    }
    EncodeReport sizes;
    fill_size_report(stream, sizes);
    const double pixels = static_cast<double>(h.width) * h.height;
    kv("records", stream.records.size())("file_bytes", bytes.size());
    kv("header_bytes", header_bytes(h))("payload_bits", sizes.payload_bits);
    kv("bpp_payload", sizes.bpp_payload)("bpp_header", static_cast<double>(sizes.header_bits) / pixels);
    kv("bpp_total", sizes.bpp_total);
    kv("ratio_payload", sizes.ratio_payload)("ratio_total", sizes.ratio_total);
    return exit_ok;
}

std::vector<fs::path> expand_corpus(const std::vector<std::string> &inputs) {
    std::vector<fs::path> files;
    for (const std::string &in : inputs) {
        const fs::path p(in);
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto &e : fs::directory_iterator(p)) {
                if (e.is_regular_file() && e.path().extension() == ".pgm") {
                    found.push_back(e.path());
                }
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(p);
        }
    }
    return files;
}

/// Runs `job` per corpus file, writing its CSV either to
/// output_dir/<stem><suffix>.csv or to `out`.
template <class Job>
int for_corpus(const CliConfig &config, const std::vector<std::string> &inputs, std::string_view suffix,
               std::ostream &out, std::ostream &err, Job job) {
    const auto files = expand_corpus(inputs);
    if (files.empty()) {
        err << "error: empty corpus\n";
        return exit_data;
    }
    int status = exit_ok;
    for (const fs::path &file : files) {
        try {
            const GrayImage image = load_input(file, config);
            std::ostringstream csv;
            job(file, image, csv);
            if (config.output_dir.empty()) {
                out << "# " << file.string() << '\n' << csv.str();
            } else {
                fs::create_directories(config.output_dir);
                const fs::path target = fs::path(config.output_dir) / (file.stem().string() + std::string(suffix) + ".csv");
                std::ofstream f(target);
                f << csv.str();
                if (!f) {
                    throw Error(ErrorCode::io_failure, "cannot write " + target.string());
                }
                out << "wrote=" << target.string() << '\n';
            }
        } catch (const Error &e) {
            err << "error: " << file.string() << ": " << e.what() << '\n';
            status = std::max(status, exit_for(e.code()));
        }
    }
    return status;
}

int cmd_sweep(const CliConfig &config, const std::vector<std::string> &inputs, std::ostream &out,
              std::ostream &err) {
    return for_corpus(config, inputs, "_sweep", out, err, [&](const fs::path &, const GrayImage &img, std::ostream &csv) {
        write_csv(csv, sweep(img, config.pool_sizes, config.encoder_config(), config.decode_options()));
    });
}

int cmd_shist(const CliConfig &config, const std::vector<std::string> &inputs, std::ostream &out,
              std::ostream &err) {
    return for_corpus(config, inputs, "_shist", out, err, [&](const fs::path &file, const GrayImage &img, std::ostream &csv) {
        const SHistogram h = s_histogram(img, config.encoder_config(SMode::baseline));
        write_histogram_csv(csv, h);
        Report kv(out);
        const std::string stem = file.stem().string();
        kv(stem + "_pool_size", h.pool_size);
        for (int s = 1; s <= kLevels; ++s) {
            const std::string p = stem + "_level" + std::to_string(s) + "_";
            kv(p + "blocks", h.level(s).blocks)(p + "mean_raw", h.level(s).mean_raw());
            kv(p + "mean_clamped", h.level(s).mean_clamped());
        }
    });
}

int cmd_bench(const CliConfig &config, const std::vector<std::string> &inputs, std::ostream &out,
              std::ostream &err) {
    return for_corpus(config, inputs, "_bench", out, err, [&](const fs::path &file, const GrayImage &img, std::ostream &csv) {
        write_csv(csv, bench_compare(img, config.pool_sizes, config.encoder_config(SMode::baseline),
                                     config.encoder_config(SMode::proposed), config.decode_options()));
        for (const PublishedReference &r : published_references(file.stem().string())) {
            out << "reference image=" << r.image << " mode=" << to_string(r.mode) << " pool_size=" << r.pool_size
                << " comp_ratio=" << r.comp_ratio << " encode_time_s=" << r.encode_time_s << " psnr_db=" << r.psnr_db;
            if (!r.note.empty()) {
                out << " note=\"" << r.note << '"';
            }
            out << '\n';
        }
    });
}

struct Setting {
    const char *flag;
    const char *key;
    const char *help;
};

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    const CliConfig defaults;
    auto join_int = [](const auto &v) {
        std::ostringstream s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            s << (i ? "," : "") << v[i];
        }
        return s.str();
    };
    const std::map<std::string, std::string> default_text = {
        {"mode", std::string(to_string(defaults.mode))},
        {"dn", std::to_string(defaults.dn)},
        {"strides", join_int(defaults.strides)},
        {"thresholds", join_int(defaults.thresholds)},
        {"baseline_thresholds", "same as --thresholds"},
        {"settle_passes", std::to_string(defaults.settle_passes)},
        {"settle_rounds", std::to_string(defaults.settle_rounds)},
        {"settle_fraction", (std::ostringstream() << defaults.settle_fraction).str()},
        {"settle_min_fixes", std::to_string(defaults.settle_min_fixes)},
        {"iterations", std::to_string(defaults.iterations)},
        {"tolerance", std::to_string(defaults.tolerance)},
        {"threads", std::to_string(defaults.threads)},
        {"pool_sizes", join_int(defaults.pool_sizes)},
        {"output_dir", "standard output"},
        {"s1", "mode's built-in set"},
        {"s2", "mode's built-in set"},
        {"s3", "mode's built-in set"},
        {"s4", "mode's built-in set"},
    };
    static constexpr Setting settings[] = {
        {"--mode", "mode", "contrast factor policy: baseline or proposed"},
        {"--dn", "dn", "domain pool size per level"},
        {"--strides", "strides", "domain lattice step per level, 4 values"},
        {"--thresholds", "thresholds", "RMS error limits T1,T2,T3 for steps 1-3"},
        {"--baseline-thresholds", "baseline_thresholds", "T1,T2,T3 for the baseline side of bench"},
        {"--s1", "s1", "s set for step 1, comma separated"},
        {"--s2", "s2", "s set for step 2"},
        {"--s3", "s3", "s set for step 3"},
        {"--s4", "s4", "s set for step 4"},
        {"--settle-passes", "settle_passes", "decoder passes the encoder makes the stream settle within; 0 is off"},
        {"--settle-rounds", "settle_rounds", "most re-match rounds spent settling"},
        {"--settle-fraction", "settle_fraction", "share of settle candidates applied per round"},
        {"--settle-min-fixes", "settle_min_fixes", "fewest settle replacements per round"},
        {"--iterations", "iterations", "maximum decoder passes"},
        {"--tolerance", "tolerance", "stop when the largest per-pixel change is at most this"},
        {"--threads", "threads", "worker threads"},
        {"--pool-sizes", "pool_sizes", "DN list for sweep and bench"},
        {"--output-dir", "output_dir", "directory for CSV output"},
    };

    CLI::App app{"Fractal quadtree image codec"};
    app.name("frak");
    app.require_subcommand(1);
    std::vector<std::pair<std::string, std::string>> given;
    std::string config_path;

    auto add_common = [&](CLI::App *sub) {
        for (const Setting &s : settings) {
            const std::string key = s.key;
            sub->add_option_function<std::string>(
                   s.flag, [&given, key](const std::string &v) { given.emplace_back(key, v); }, s.help)
                ->default_str(default_text.at(key))
                ->type_name("VALUE");
        }
        sub->add_flag_function(
               "--crop", [&given](std::int64_t) { given.emplace_back("crop", "true"); },
               "center-crop inputs to multiples of 16 instead of rejecting them")
            ->default_str("off");
        sub->add_option("--config", config_path, "key=value settings file; flags override it")->type_name("PATH");
    };

    std::string input, output;
    std::vector<std::string> corpus;
    CLI::App *enc = app.add_subcommand("encode", "compress a PGM image");
    enc->add_option("input", input, "input PGM")->required();
    enc->add_option("output", output, "output stream")->required();
    CLI::App *dec = app.add_subcommand("decode", "decompress a stream to PGM");
    dec->add_option("input", input, "input stream")->required();
    dec->add_option("output", output, "output PGM")->required();
    CLI::App *ins = app.add_subcommand("inspect", "print stream header and size breakdown");
    ins->add_option("input", input, "input stream")->required();
    CLI::App *swp = app.add_subcommand("sweep", "PSNR, ratio and time over pool sizes");
    CLI::App *shs = app.add_subcommand("shist", "histograms of the least-squares s per step");
    CLI::App *bch = app.add_subcommand("bench", "baseline versus proposed over pool sizes");
    for (CLI::App *sub : {swp, shs, bch}) {
        sub->add_option("corpus", corpus, "PGM files or directories")->required();
    }
    for (CLI::App *sub : {enc, dec, ins, swp, shs, bch}) {
        add_common(sub);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        CliConfig config;
        if (!config_path.empty()) {
            apply_config_file(config, config_path);
        }
        for (const auto &[key, value] : given) {
            apply_setting(config, key, value);
        }
        if (*enc) {
            return cmd_encode(config, input, output, out);
        }
        if (*dec) {
            return cmd_decode(config, input, output, out);
        }
        if (*ins) {
            return cmd_inspect(input, out);
        }
        if (*swp) {
            return cmd_sweep(config, corpus, out, err);
        }
        if (*shs) {
            return cmd_shist(config, corpus, out, err);
        }
        return cmd_bench(config, corpus, out, err);
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return exit_for(e.code());
    } catch (const fs::filesystem_error &e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    }
}

} // namespace frak::cli
