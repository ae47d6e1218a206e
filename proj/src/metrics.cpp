#include "frak/metrics.hpp"

#include <cmath>
#include <cstdint>

namespace frak {

double mse(const GrayImage &original, const GrayImage &decoded) {
    if (original.width() != decoded.width() || original.height() != decoded.height()) {
        throw Error(ErrorCode::dimension_mismatch, "PSNR needs images of equal size");
    }
    if (original.empty()) {
        return 0.0;
    }
    std::int64_t ssd = 0;
    const auto a = original.pixels();
    const auto b = decoded.pixels();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
        ssd += d * d;
    }
    return static_cast<double>(ssd) / static_cast<double>(a.size());
}

double psnr_from_mse(double value) {
    if (value <= 0.0) {
        return kPsnrInfinite;
    }
    return 10.0 * std::log10(255.0 * 255.0 / value);
}

double psnr(const GrayImage &original, const GrayImage &decoded) { return psnr_from_mse(mse(original, decoded)); }

} // namespace frak
