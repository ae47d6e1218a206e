#pragma once

#include <limits>

#include "frak/image.hpp"

namespace frak {

/// Returned by psnr() for identical images.
inline constexpr double kPsnrInfinite = std::numeric_limits<double>::infinity();

double mse(const GrayImage &original, const GrayImage &decoded);
/// 10 log10(255^2 / MSE); kPsnrInfinite when MSE is zero.
double psnr(const GrayImage &original, const GrayImage &decoded);
double psnr_from_mse(double mse);

struct QualityReport {
    double psnr = 0.0;
    double mse = 0.0;
    double bpp = 0.0;
    double compression_ratio_payload = 0.0;
    double compression_ratio_total = 0.0;
    double encode_time = 0.0;
    double decode_time = 0.0;
};

} // namespace frak
