#pragma once

#include <vector>

#include "types.hpp"

namespace evtk {

/// Frame preprocessing: tile-based contrast limiting, unit normalization,
/// aspect-preserving square resize, and bbox patch extraction.

struct PrepConfig {
    int clahe_tiles_x = 8;
    int clahe_tiles_y = 8;
    double clahe_clip_limit = 2.0;
    int target_size = 640;
    double frame_pad_value = 114.0 / 255.0; // letterbox fill for frames
    double hist_pad_value = 0.0;            // letterbox fill for histogram channels
};

void check_prep_config(const PrepConfig& cfg);

/// Real-valued grayscale image, row-major.
struct ImageF {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Uniform-scale affine map x' = s*x + dx, y' = s*y + dy.
struct AffineMap {
    double scale = 1.0;
    double dx = 0.0;
    double dy = 0.0;

    void apply(double& x, double& y) const {
        x = scale * x + dx;
        y = scale * y + dy;
    }
    void invert(double& x, double& y) const {
        x = (x - dx) / scale;
        y = (y - dy) / scale;
    }
    BBox apply(const BBox& b) const {
        return {scale * b.x + dx, scale * b.y + dy, scale * b.w, scale * b.h};
    }
    BBox invert(const BBox& b) const {
        return {(b.x - dx) / scale, (b.y - dy) / scale, b.w / scale, b.h / scale};
    }
};

/// Contrast-limited tile equalization over an 8-bit frame. Per-tile
/// histograms are clipped at clip_limit times the uniform bin height with
/// the excess redistributed, per-tile transfer functions are blended
/// bilinearly between tile centers. Dimensions that do not divide into the
/// tile grid are handled by mirror-padding the analysis image.
Frame clahe(const Frame& frame, const PrepConfig& cfg);

/// 8-bit frame to [0,1] reals (divide by 255).
ImageF normalize_unit(const Frame& frame);

struct LetterboxResult {
    ImageF image;     // target_size x target_size
    AffineMap map;    // source pixel coords -> output pixel coords
    int content_w = 0;
    int content_h = 0;
    int pad_left = 0;
    int pad_top = 0;
};

/// Scales by target/max(W,H) on both axes (bilinear), centers the result in
/// a square canvas filled with pad_value. The returned map carries box
/// coordinates into the output plane exactly.
LetterboxResult letterbox(const ImageF& image, int target_size, double pad_value);

/// Crops the bbox (clipped to image bounds) and resizes it to
/// out_size x out_size with plain bilinear sampling. Raises DegenerateBox
/// when the clipped region has zero area.
ImageF crop_patch(const ImageF& image, const BBox& bbox, int out_size);

} // namespace evtk
