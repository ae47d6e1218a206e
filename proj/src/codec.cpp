#include "frak/codec.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <string>

#include "frak/parallel.hpp"

namespace frak {

void EncoderConfig::validate() const {
    for (double t : thresholds) {
        if (!(t > 0.0)) {
            throw Error(ErrorCode::invalid_config, "thresholds must be > 0");
        }
    }
    pool.validate();
    policy.validate();
    if (threads < 1) {
        throw Error(ErrorCode::invalid_config, "threads must be >= 1");
    }
    if (settle_passes < 0 || settle_rounds < 0 || settle_min_fixes < 0) {
        throw Error(ErrorCode::invalid_config, "settle passes, rounds and fixes must be >= 0");
    }
    if (!(settle_fraction > 0.0 && settle_fraction <= 1.0)) {
        throw Error(ErrorCode::invalid_config, "settle fraction must be in (0, 1]");
    }
}

double EncoderConfig::ssd_limit(int step, int pixels) const {
    const double t = thresholds[static_cast<std::size_t>(step - 1)];
    return t * t * pixels;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct BlockOutput {
    std::vector<MatchRecord> records;
    std::vector<std::int64_t> errors;
    std::array<long, kLevels> step_blocks{};
    std::int64_t ssd = 0;
};

void encode_slot(const GrayImage &image, const Matcher &matcher, const EncoderConfig &config, int x, int y, int step,
                 BlockOutput &out) {
    const int side = range_side(step);
    const Tile range = extract(image, BlockView{x, y, side});
    const MatchResult m = matcher.level(step).best_match(range);
    if (step == kLevels || static_cast<double>(m.error) <= config.ssd_limit(step, side * side)) {
        out.records.push_back(MatchRecord{static_cast<std::uint8_t>(step), m.offset,
                                          static_cast<std::uint8_t>(m.isometry.index()), m.domain_index,
                                          m.s_index});
        out.errors.push_back(m.error);
        ++out.step_blocks[static_cast<std::size_t>(step - 1)];
        out.ssd += m.error;
        return;
    }
    const int half = side / 2;
    encode_slot(image, matcher, config, x, y, step + 1, out);
    encode_slot(image, matcher, config, x + half, y, step + 1, out);
    encode_slot(image, matcher, config, x, y + half, step + 1, out);
    encode_slot(image, matcher, config, x + half, y + half, step + 1, out);
}

/// Output-to-input index maps for every isometry at every range side.
const std::vector<std::uint16_t> &permutation(Isometry iso, int step) {
    static const auto table = [] {
        std::array<std::array<std::vector<std::uint16_t>, Isometry::count>, kLevels> t;
        for (int st = 1; st <= kLevels; ++st) {
            for (int k = 0; k < Isometry::count; ++k) {
                t[static_cast<std::size_t>(st - 1)][static_cast<std::size_t>(k)] =
                    isometry_permutation(Isometry(k), range_side(st));
            }
        }
        return t;
    }();
    return table[static_cast<std::size_t>(step - 1)][static_cast<std::size_t>(iso.index())];
}

// Same arithmetic as decimate() and scaled_terms(), on stack buffers.
void render_leaf(const CompressedStream &stream, const Leaf &leaf, const GrayImage &current, GrayImage &next) {
    const StreamHeader &h = stream.header;
    const MatchRecord &r = stream.records[leaf.record];
    const LevelHeader &lv = h.level(r.step);
    const auto origin = lv.origins[r.domain_address];
    const int side = leaf.range.side;
    const std::size_t n = static_cast<std::size_t>(side) * side;
    std::array<std::uint8_t, 256> dom;
    std::int64_t sum = 0;
    for (int j = 0; j < side; ++j) {
        const std::uint8_t *r0 = current.row(origin[1] + 2 * j) + origin[0];
        const std::uint8_t *r1 = r0 + current.width();
        for (int i = 0; i < side; ++i) {
            const int v = (r0[2 * i] + r0[2 * i + 1] + r1[2 * i] + r1[2 * i + 1]) >> 2;
            dom[static_cast<std::size_t>(j) * side + i] = static_cast<std::uint8_t>(v);
            sum += v;
        }
    }
    const double center = h.mode == SMode::proposed ? static_cast<double>(sum) / static_cast<double>(n) : 0.0;
    const double s = lv.s_values[r.s_index];
    std::array<std::uint8_t, 256> out;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = static_cast<std::uint8_t>(
            clamp_pixel(round_half_up(s * (static_cast<double>(dom[i]) - center)) + r.offset));
    }
    const auto &perm = permutation(Isometry(r.isometry), r.step);
    for (int y = 0; y < side; ++y) {
        std::uint8_t *dst = next.row(leaf.range.y + y) + leaf.range.x;
        const std::uint16_t *p = perm.data() + static_cast<std::size_t>(y) * side;
        for (int x = 0; x < side; ++x) {
            dst[x] = out[p[x]];
        }
    }
}

int max_abs_diff(const GrayImage &a, const GrayImage &b) {
    const auto pa = a.pixels();
    const auto pb = b.pixels();
    int change = 0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        change = std::max(change, std::abs(static_cast<int>(pa[i]) - static_cast<int>(pb[i])));
    }
    return change;
}

/// Summed-area table over a 0/1 mask of `cell`-pixel squares, for
/// rectangle hit tests in pixel coordinates.
class MaskSums {
  public:
    MaskSums(int width, int height, int cell = 1)
        : cell_(cell), cols_((width + cell - 1) / cell), rows_((height + cell - 1) / cell),
          mask_(static_cast<std::size_t>(cols_) * rows_, 0),
          sums_(static_cast<std::size_t>(cols_ + 1) * (rows_ + 1), 0) {}

    std::vector<std::uint8_t> &mask() { return mask_; }

    void clear() { std::fill(mask_.begin(), mask_.end(), 0); }

    void mark(const BlockView &v) {
        for (int cy = v.y / cell_; cy <= (v.y + v.side - 1) / cell_; ++cy) {
            for (int cx = v.x / cell_; cx <= (v.x + v.side - 1) / cell_; ++cx) {
                mask_[static_cast<std::size_t>(cy) * cols_ + cx] = 1;
            }
        }
    }

    void build() {
        for (int y = 0; y < rows_; ++y) {
            int row = 0;
            for (int x = 0; x < cols_; ++x) {
                row += mask_[static_cast<std::size_t>(y) * cols_ + x];
                at(x + 1, y + 1) = at(x + 1, y) + row;
            }
        }
    }

    bool any(int x, int y, int side) const { return count(x, y, side) > 0; }

    int count(int x, int y, int side) const {
        const int x0 = x / cell_, y0 = y / cell_;
        const int x1 = (x + side - 1) / cell_ + 1, y1 = (y + side - 1) / cell_ + 1;
        return at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0);
    }

  private:
    int &at(int x, int y) { return sums_[static_cast<std::size_t>(y) * (cols_ + 1) + x]; }
    int at(int x, int y) const { return sums_[static_cast<std::size_t>(y) * (cols_ + 1) + x]; }

    int cell_;
    int cols_;
    int rows_;
    std::vector<std::uint8_t> mask_;
    std::vector<int> sums_;
};

bool same_block(const GrayImage &a, const GrayImage &b, const BlockView &v) {
    for (int y = v.y; y < v.y + v.side; ++y) {
        if (!std::equal(a.row(y) + v.x, a.row(y) + v.x + v.side, b.row(y) + v.x)) {
            return false;
        }
    }
    return true;
}

/// Decoder iterates from the constant start: iterate[0] is the start image
/// and change[i] the largest difference between iterate[i + 1] and iterate[i].
struct Trajectory {
    std::vector<GrayImage> iterate;
    std::vector<int> change;
};

Trajectory simulate(const CompressedStream &stream, const std::vector<Leaf> &leaves, int passes) {
    Trajectory t;
    t.iterate.emplace_back(stream.header.width, stream.header.height, 128);
    for (int i = 0; i < passes; ++i) {
        t.iterate.push_back(apply_collage(stream, leaves, t.iterate.back()));
        t.change.push_back(max_abs_diff(t.iterate[t.iterate.size() - 2], t.iterate.back()));
    }
    return t;
}

constexpr int kDiffCell = 4;

/// Per-level flags of pool entries whose domain touches a marked cell.
void touched_entries(const StreamHeader &h, const MaskSums &cells, bool any_marked,
                     std::array<std::vector<std::uint8_t>, kLevels> &touched) {
    for (int step = 1; step <= kLevels; ++step) {
        const LevelHeader &lv = h.level(step);
        auto &d = touched[static_cast<std::size_t>(step - 1)];
        d.assign(lv.origins.size(), 0);
        if (any_marked) {
            for (std::size_t e = 0; e < lv.origins.size(); ++e) {
                d[e] = cells.any(lv.origins[e][0], lv.origins[e][1], domain_side(step)) ? 1 : 0;
            }
        }
    }
}

/// One collage pass over `input` computed as an edit of `out`, which on
/// entry holds the pass output for a reference input that differs from
/// `input` only inside the cells marked in `input_diff`. Leaves with a
/// changed record or a domain touching those cells are re-rendered. Cells
/// where the result departs from the entry value are marked in `out_diff`.
/// Returns whether any did.
bool edit_pass(const CompressedStream &stream, const std::vector<Leaf> &leaves,
               const std::vector<std::uint8_t> &record_changed, const GrayImage &input, const MaskSums &input_diff,
               bool input_differs, GrayImage &out, MaskSums &out_diff) {
    std::array<std::vector<std::uint8_t>, kLevels> dirty;
    touched_entries(stream.header, input_diff, input_differs, dirty);
    out_diff.clear();
    bool differs = false;
    std::array<std::uint8_t, 256> saved;
    for (const Leaf &leaf : leaves) {
        const MatchRecord &r = stream.records[leaf.record];
        if (!record_changed[leaf.record] && !dirty[static_cast<std::size_t>(r.step - 1)][r.domain_address]) {
            continue;
        }
        const BlockView &v = leaf.range;
        for (int y = 0; y < v.side; ++y) {
            std::copy_n(out.row(v.y + y) + v.x, v.side, saved.begin() + y * v.side);
        }
        render_leaf(stream, leaf, input, out);
        for (int y = 0; y < v.side; ++y) {
            if (!std::equal(saved.begin() + y * v.side, saved.begin() + (y + 1) * v.side, out.row(v.y + y) + v.x)) {
                out_diff.mark(v);
                differs = true;
                break;
            }
        }
    }
    out_diff.build();
    return differs;
}

/// Recomputes a trajectory after some records changed.
void resimulate(const CompressedStream &stream, const std::vector<Leaf> &leaves,
                const std::vector<std::uint8_t> &record_changed, Trajectory &t) {
    const StreamHeader &h = stream.header;
    MaskSums diff(h.width, h.height, kDiffCell);
    MaskSums next_diff(h.width, h.height, kDiffCell);
    bool input_differs = false;
    for (std::size_t i = 1; i < t.iterate.size(); ++i) {
        GrayImage &out = t.iterate[i];
        input_differs = edit_pass(stream, leaves, record_changed, t.iterate[i - 1], diff, input_differs, out, next_diff);
        std::swap(diff, next_diff);
        t.change[i - 1] = max_abs_diff(t.iterate[i - 1], out);
    }
}

/// 1-based pass to blame, or 0 when the trajectory settles: reaches zero
/// change with no increase from the third pass on.
std::size_t unsettled_pass(const std::vector<int> &change) {
    for (std::size_t i = 0; i < change.size(); ++i) {
        if (i >= 2 && change[i] > change[i - 1]) {
            return i + 1;
        }
        if (change[i] == 0) {
            return 0;
        }
    }
    return change.size();
}

bool same_fields(const MatchRecord &a, const MatchResult &m) {
    return a.offset == m.offset && a.isometry == m.isometry.index() && a.domain_address == m.domain_index &&
           a.s_index == m.s_index;
}

struct Fix {
    std::int64_t cost;
    std::size_t record;
    MatchResult match;
};

/// Longest limit cycle looked for while iterating near the attractor.
constexpr std::size_t kMaxPeriod = 8;
/// Passes allowed to reach a fixed point or a cycle after a tail repair.
constexpr int kTailPatience = 16;

/// Replaces records of oscillating leaves until the decoder settles within
/// config.settle_passes.
///
/// Repairs mark unstable pixels, the ones that changed in either of two
/// consecutive passes, and re-match every leaf touching them against
/// domains clear of those pixels. The cheapest share of the candidates, by
/// SSD above the leaf's unrestricted best, is applied.
///
/// Most trajectories end in a small limit cycle. Those are first repaired
/// by iterating on from the last iterate, where a pass only touches leaves
/// fed by changed pixels, until a fixed point appears; the full trajectory
/// from the constant start is then recomputed to check. Anything else, or a
/// tail that cannot be repaired, falls back to blaming the first pass that
/// breaks the settle rule on the full trajectory.
class Settler {
  public:
    Settler(const GrayImage &image, const Matcher &matcher, const EncoderConfig &config,
            std::vector<std::int64_t> &errors, EncodeResult &result)
        : image_(image), matcher_(matcher), config_(config), best_errors_(errors), errors_(errors),
          stream_(result.stream), report_(result.report), leaves_(layout(stream_)),
          unstable_(stream_.header.width, stream_.header.height), pending_(stream_.records.size(), 0) {}

    void run() {
        Trajectory t = simulate(stream_, leaves_, config_.settle_passes);
        for (;;) {
            const std::size_t k = unsettled_pass(t.change);
            if (k == 0) {
                report_.settled = true;
                return;
            }
            if (out_of_rounds()) {
                report_.settled = false;
                return;
            }
            bool repaired = t.change.back() != 0 && repair_tail(t);
            if (!repaired) {
                const std::vector<GrayImage> around = {t.iterate[k], t.iterate[k - 1], t.iterate[k >= 2 ? k - 2 : k - 1]};
                mark_unstable(around, 2);
                repaired = repair();
            }
            if (!repaired) {
                report_.settled = false;
                return;
            }
            resimulate(stream_, leaves_, pending_, t);
            std::fill(pending_.begin(), pending_.end(), 0);
        }
    }

  private:
    bool out_of_rounds() const { return report_.settle_rounds >= config_.settle_rounds; }

    /// Marks pixels that differ between consecutive iterates among the
    /// first `span` + 1 of `iterates`, newest first.
    template <class Seq> void mark_unstable(const Seq &iterates, std::size_t span) {
        auto &mask = unstable_.mask();
        std::fill(mask.begin(), mask.end(), 0);
        for (std::size_t j = 0; j < span && j + 1 < iterates.size(); ++j) {
            const auto a = iterates[j].pixels();
            const auto b = iterates[j + 1].pixels();
            for (std::size_t p = 0; p < mask.size(); ++p) {
                mask[p] |= a[p] != b[p] ? 1 : 0;
            }
        }
        unstable_.build();
    }

    /// Applies the cheapest candidates for the current unstable mask and
    /// flags their records in `changed` and in pending_. False when no leaf
    /// has a candidate.
    bool repair(std::vector<std::uint8_t> *changed = nullptr) {
        const StreamHeader &h = stream_.header;
        std::array<std::vector<std::uint8_t>, kLevels> allowed;
        for (int step = 1; step <= kLevels; ++step) {
            const LevelHeader &lv = h.level(step);
            auto &a = allowed[static_cast<std::size_t>(step - 1)];
            // domains clear of unstable pixels, else the least touched ones
            std::vector<int> hits(lv.origins.size());
            for (std::size_t e = 0; e < lv.origins.size(); ++e) {
                hits[e] = unstable_.count(lv.origins[e][0], lv.origins[e][1], domain_side(step));
            }
            const int fewest = hits.empty() ? 0 : *std::min_element(hits.begin(), hits.end());
            a.resize(lv.origins.size());
            for (std::size_t e = 0; e < lv.origins.size(); ++e) {
                a[e] = hits[e] == fewest ? 1 : 0;
            }
        }
        // Flagged leaves by step. Finer leaves are cheaper to re-match and
        // usually cost less SSD, so steps are evaluated finest first until
        // there are twice as many candidates as will be applied.
        std::array<std::vector<const Leaf *>, kLevels> flagged;
        std::size_t total = 0;
        for (const Leaf &leaf : leaves_) {
            if (unstable_.any(leaf.range.x, leaf.range.y, leaf.range.side)) {
                flagged[static_cast<std::size_t>(stream_.records[leaf.record].step - 1)].push_back(&leaf);
                ++total;
            }
        }
        const auto share = static_cast<std::size_t>(config_.settle_fraction * static_cast<double>(total));
        const std::size_t quota = std::max({share, static_cast<std::size_t>(config_.settle_min_fixes), std::size_t{1}});
        std::vector<Fix> fixes;
        for (int step = kLevels; step >= 1 && fixes.size() < 2 * quota; --step) {
            for (const Leaf *leaf : flagged[static_cast<std::size_t>(step - 1)]) {
                const MatchRecord &r = stream_.records[leaf->record];
                const auto m = matcher_.level(step).best_match_among(extract(image_, leaf->range),
                                                                     allowed[static_cast<std::size_t>(step - 1)]);
                if (m && !same_fields(r, *m)) {
                    fixes.push_back({m->error - best_errors_[leaf->record], leaf->record, *m});
                }
            }
        }
        if (fixes.empty()) {
            return false;
        }
        std::sort(fixes.begin(), fixes.end(), [](const Fix &a, const Fix &b) {
            return a.cost != b.cost ? a.cost < b.cost : a.record < b.record;
        });
        const std::size_t take = std::min(fixes.size(), quota);
        for (std::size_t i = 0; i < take; ++i) {
            const Fix &f = fixes[i];
            MatchRecord &r = stream_.records[f.record];
            r.offset = f.match.offset;
            r.isometry = static_cast<std::uint8_t>(f.match.isometry.index());
            r.domain_address = f.match.domain_index;
            r.s_index = f.match.s_index;
            report_.collage_ssd += f.match.error - errors_[f.record];
            errors_[f.record] = f.match.error;
            pending_[f.record] = 1;
            if (changed) {
                (*changed)[f.record] = 1;
            }
        }
        report_.settled_records += static_cast<long>(take);
        ++report_.settle_rounds;
        return true;
    }

    /// Iterates on from the last two iterates of `t` until a pass changes
    /// nothing. Whenever the iterate repeats one from up to kMaxPeriod
    /// passes back, the pixels that vary around that cycle are repaired;
    /// without a cycle the last two passes are used after kTailPatience
    /// passes. True when a fixed point was reached after at least one repair.
    bool repair_tail(const Trajectory &t) {
        const StreamHeader &h = stream_.header;
        const std::size_t last = t.iterate.size() - 1;
        // history[0] is the current iterate, history[j] the one j passes back
        std::deque<GrayImage> history = {t.iterate[last], t.iterate[last - 1]};
        MaskSums diff(h.width, h.height, kDiffCell);
        MaskSums next_diff(h.width, h.height, kDiffCell);
        for (const Leaf &leaf : leaves_) {
            if (!same_block(history[0], history[1], leaf.range)) {
                diff.mark(leaf.range);
            }
        }
        diff.build();
        bool differs = true;
        std::vector<std::uint8_t> changed(stream_.records.size(), 0);
        bool repaired = false;
        int since_repair = 0;
        for (;;) {
            GrayImage next = history[0];
            differs = edit_pass(stream_, leaves_, changed, history[0], diff, differs, next, next_diff);
            std::fill(changed.begin(), changed.end(), 0);
            std::swap(diff, next_diff);
            history.push_front(std::move(next));
            if (history.size() > kMaxPeriod + 1) {
                history.pop_back();
            }
            if (!differs) {
                return repaired;
            }
            ++since_repair;
            std::size_t period = 0;
            for (std::size_t p = 2; p < history.size() && period == 0; ++p) {
                if (std::ranges::equal(history[0].pixels(), history[p].pixels())) {
                    period = p;
                }
            }
            if (period == 0 && since_repair < kTailPatience) {
                continue;
            }
            if (out_of_rounds()) {
                return repaired;
            }
            mark_unstable(history, std::max<std::size_t>(period, 2));
            if (!repair(&changed)) {
                return repaired;
            }
            repaired = true;
            since_repair = 0;
        }
    }

    const GrayImage &image_;
    const Matcher &matcher_;
    const EncoderConfig &config_;
    const std::vector<std::int64_t> best_errors_;
    std::vector<std::int64_t> &errors_;
    CompressedStream &stream_;
    EncodeReport &report_;
    const std::vector<Leaf> leaves_;
    MaskSums unstable_;
    /// Records changed since the trajectory was last recomputed.
    std::vector<std::uint8_t> pending_;
};

} // namespace

void fill_size_report(const CompressedStream &stream, EncodeReport &report) {
    const double original_bits = 8.0 * stream.header.width * stream.header.height;
    const double pixels = static_cast<double>(stream.header.width) * stream.header.height;
    report.payload_bits = payload_bits(stream);
    report.header_bits = 8 * header_bytes(stream.header);
    const std::size_t file_bits = report.header_bits + (report.payload_bits + 7) / 8 * 8;
    report.bpp_payload = static_cast<double>(report.payload_bits) / pixels;
    report.bpp_total = static_cast<double>(file_bits) / pixels;
    report.ratio_payload = original_bits / static_cast<double>(report.payload_bits);
    report.ratio_total = original_bits / static_cast<double>(file_bits);
}

EncodeResult encode(const GrayImage &image, const EncoderConfig &config) {
    config.validate();
    require_dimensions_multiple_of(image, range_side(1));
    const auto start = Clock::now();

    PoolParams pool_params = config.pool;
    pool_params.threads = config.threads;
    const DomainPool pool = build_pool(image, pool_params);
    const Matcher matcher(pool, config.policy);
    EncodeResult result;
    result.report.pool_seconds = seconds_since(start);

    const int top = range_side(1);
    const int cols = image.width() / top;
    const std::size_t slots = static_cast<std::size_t>(cols) * static_cast<std::size_t>(image.height() / top);
    std::vector<BlockOutput> blocks(slots);
    parallel_for(slots, config.threads, [&](std::size_t i) {
        const int x = static_cast<int>(i % static_cast<std::size_t>(cols)) * top;
        const int y = static_cast<int>(i / static_cast<std::size_t>(cols)) * top;
        encode_slot(image, matcher, config, x, y, 1, blocks[i]);
    });

    StreamHeader &h = result.stream.header;
    h.width = image.width();
    h.height = image.height();
    h.mode = config.policy.mode;
    for (int step = 1; step <= kLevels; ++step) {
        LevelHeader &lv = h.levels[static_cast<std::size_t>(step - 1)];
        const DomainLevel &dl = pool.level(step);
        lv.stride = dl.stride;
        lv.s_values = config.policy.set(step);
        lv.origins.reserve(dl.entries.size());
        for (const DomainEntry &e : dl.entries) {
            lv.origins.push_back({static_cast<std::uint16_t>(e.x), static_cast<std::uint16_t>(e.y)});
        }
    }
    std::vector<std::int64_t> errors;
    for (BlockOutput &b : blocks) {
        result.stream.records.insert(result.stream.records.end(), b.records.begin(), b.records.end());
        errors.insert(errors.end(), b.errors.begin(), b.errors.end());
        for (int s = 0; s < kLevels; ++s) {
            result.report.step_blocks[static_cast<std::size_t>(s)] += b.step_blocks[static_cast<std::size_t>(s)];
        }
        result.report.collage_ssd += b.ssd;
    }
    if (config.settle_passes > 0) {
        const auto settle_start = Clock::now();
        Settler(image, matcher, config, errors, result).run();
        result.report.settle_seconds = seconds_since(settle_start);
    }
    result.report.encode_seconds = seconds_since(start);
    fill_size_report(result.stream, result.report);
    return result;
}

GrayImage apply_collage(const CompressedStream &stream, const std::vector<Leaf> &leaves, const GrayImage &current,
                        int threads) {
    GrayImage next(stream.header.width, stream.header.height);
    parallel_for(leaves.size(), threads, [&](std::size_t i) { render_leaf(stream, leaves[i], current, next); });
    return next;
}

DecodeResult decode_detailed(const CompressedStream &stream, const DecodeOptions &options) {
    validate(stream);
    const auto start = Clock::now();
    const auto leaves = layout(stream);
    DecodeResult result;
    result.image = GrayImage(stream.header.width, stream.header.height, 128);
    for (int pass = 0; pass < options.iterations; ++pass) {
        GrayImage next = apply_collage(stream, leaves, result.image, options.threads);
        const int change = max_abs_diff(result.image, next);
        result.image = std::move(next);
        result.max_change.push_back(change);
        ++result.iterations;
        if (change <= options.tolerance) {
            break;
        }
    }
    result.decode_seconds = seconds_since(start);
    return result;
}

GrayImage decode(const CompressedStream &stream, int iterations, int tolerance) {
    DecodeOptions options;
    options.iterations = iterations;
    options.tolerance = tolerance;
    return decode_detailed(stream, options).image;
}

} // namespace frak
