#include "frame_prep.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace evtk {
namespace {

// Round-half-to-even, the rounding used by the reference filter's
// saturate_cast. Relies on the default FE_TONEAREST mode.
int round_even(double v) { return static_cast<int>(std::nearbyint(v)); }

std::uint8_t to_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(round_even(v), 0, 255));
}

// Mirror index without edge repetition (…, 2, 1, | 0, 1, …, n-1 | n-2, …).
int reflect101(int i, int n) {
    if (n == 1) return 0;
    if (i < 0) return -i;
    if (i >= n) return 2 * n - 2 - i;
    return i;
}

double bilinear_sample(const ImageF& img, double sx, double sy) {
    sx = std::clamp(sx, 0.0, static_cast<double>(img.width - 1));
    sy = std::clamp(sy, 0.0, static_cast<double>(img.height - 1));
    const int x0 = static_cast<int>(std::floor(sx));
    const int y0 = static_cast<int>(std::floor(sy));
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = sx - x0;
    const double fy = sy - y0;
    const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
    const double bot = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
    return top * (1.0 - fy) + bot * fy;
}

} // namespace

void check_prep_config(const PrepConfig& cfg) {
    if (cfg.clahe_tiles_x < 1 || cfg.clahe_tiles_y < 1)
        raise(ErrorCode::BadConfig, "tile grid must be at least 1x1");
    if (cfg.clahe_clip_limit < 1.0)
        raise(ErrorCode::BadConfig, "clip limit must be at least 1.0");
    if (cfg.target_size < 32)
        raise(ErrorCode::BadConfig, "target size must be at least 32");
}

Frame clahe(const Frame& frame, const PrepConfig& cfg) {
    check_prep_config(cfg);
    const int tiles_x = cfg.clahe_tiles_x;
    const int tiles_y = cfg.clahe_tiles_y;
    const int w = frame.width;
    const int h = frame.height;
    if (w < 1 || h < 1) raise(ErrorCode::BadShape, "empty frame");

    // Histograms are computed over a mirror-padded copy whenever the plane
    // does not divide evenly into tiles; the transfer pass then runs over
    // the original pixels only.
    int ext_w = w;
    int ext_h = h;
    if (w % tiles_x != 0 || h % tiles_y != 0) {
        ext_w = w + (tiles_x - w % tiles_x);
        ext_h = h + (tiles_y - h % tiles_y);
    }
    const int tile_w = ext_w / tiles_x;
    const int tile_h = ext_h / tiles_y;
    const int tile_area = tile_w * tile_h;

    int clip_limit = 0;
    if (cfg.clahe_clip_limit > 0.0)
        clip_limit = std::max(static_cast<int>(cfg.clahe_clip_limit * tile_area / 256), 1);

    const float lut_scale = 255.0f / static_cast<float>(tile_area);

    auto padded_at = [&](int x, int y) -> std::uint8_t {
        return frame.at(reflect101(x, w), reflect101(y, h));
    };

    // One 256-entry transfer function per tile.
    std::vector<std::uint8_t> luts(static_cast<std::size_t>(tiles_x) * tiles_y * 256);
    for (int ty = 0; ty < tiles_y; ++ty) {
        for (int tx = 0; tx < tiles_x; ++tx) {
            int hist[256] = {};
            for (int y = ty * tile_h; y < (ty + 1) * tile_h; ++y)
                for (int x = tx * tile_w; x < (tx + 1) * tile_w; ++x)
                    ++hist[padded_at(x, y)];

            if (clip_limit > 0) {
                int clipped = 0;
                for (int& bin : hist) {
                    if (bin > clip_limit) {
                        clipped += bin - clip_limit;
                        bin = clip_limit;
                    }
                }
                const int batch = clipped / 256;
                int residual = clipped - batch * 256;
                for (int& bin : hist) bin += batch;
                if (residual > 0) {
                    const int step = std::max(256 / residual, 1);
                    for (int i = 0; i < 256 && residual > 0; i += step, --residual) ++hist[i];
                }
            }

            std::uint8_t* lut = luts.data() + (static_cast<std::size_t>(ty) * tiles_x + tx) * 256;
            int sum = 0;
            for (int i = 0; i < 256; ++i) {
                sum += hist[i];
                lut[i] = static_cast<std::uint8_t>(
                    std::clamp(round_even(static_cast<float>(sum) * lut_scale), 0, 255));
            }
        }
    }

    // Bilinear blend between the four surrounding tile transfer functions,
    // anchored at tile centers.
    Frame out;
    out.t = frame.t;
    out.width = w;
    out.height = h;
    out.pixels.resize(frame.pixels.size());
    const float inv_tw = 1.0f / static_cast<float>(tile_w);
    const float inv_th = 1.0f / static_cast<float>(tile_h);
    auto lut_of = [&](int ty, int tx) {
        return luts.data() + (static_cast<std::size_t>(ty) * tiles_x + tx) * 256;
    };
    for (int y = 0; y < h; ++y) {
        const float tyf = static_cast<float>(y) * inv_th - 0.5f;
        const int ty_base = static_cast<int>(std::floor(tyf));
        const float ya = tyf - static_cast<float>(ty_base);
        const int ty1 = std::max(ty_base, 0);
        const int ty2 = std::min(ty_base + 1, tiles_y - 1);
        for (int x = 0; x < w; ++x) {
            const float txf = static_cast<float>(x) * inv_tw - 0.5f;
            const int tx_base = static_cast<int>(std::floor(txf));
            const float xa = txf - static_cast<float>(tx_base);
            const int tx1 = std::max(tx_base, 0);
            const int tx2 = std::min(tx_base + 1, tiles_x - 1);

            const std::uint8_t v = frame.at(x, y);
            const float res = static_cast<float>(lut_of(ty1, tx1)[v]) * (1.0f - xa) * (1.0f - ya) +
                              static_cast<float>(lut_of(ty1, tx2)[v]) * xa * (1.0f - ya) +
                              static_cast<float>(lut_of(ty2, tx1)[v]) * (1.0f - xa) * ya +
                              static_cast<float>(lut_of(ty2, tx2)[v]) * xa * ya;
            out.pixels[static_cast<std::size_t>(y) * w + x] = to_u8(res);
        }
    }
    return out;
}

ImageF normalize_unit(const Frame& frame) {
    ImageF out;
    out.width = frame.width;
    out.height = frame.height;
    out.pixels.resize(frame.pixels.size());
    for (std::size_t i = 0; i < frame.pixels.size(); ++i)
        out.pixels[i] = static_cast<double>(frame.pixels[i]) / 255.0;
    return out;
}

LetterboxResult letterbox(const ImageF& image, int target_size, double pad_value) {
    if (image.width < 1 || image.height < 1) raise(ErrorCode::BadShape, "empty image");
    if (target_size < 1) raise(ErrorCode::BadConfig, "target size must be positive");

    const double s = static_cast<double>(target_size) / std::max(image.width, image.height);
    const int content_w = static_cast<int>(std::lround(image.width * s));
    const int content_h = static_cast<int>(std::lround(image.height * s));
    const int pad_left = (target_size - content_w) / 2;
    const int pad_top = (target_size - content_h) / 2;

    LetterboxResult result;
    result.content_w = content_w;
    result.content_h = content_h;
    result.pad_left = pad_left;
    result.pad_top = pad_top;
    result.map = {s, static_cast<double>(pad_left), static_cast<double>(pad_top)};
    result.image.width = target_size;
    result.image.height = target_size;
    result.image.pixels.assign(static_cast<std::size_t>(target_size) * target_size, pad_value);

    const double step_x = static_cast<double>(image.width) / content_w;
    const double step_y = static_cast<double>(image.height) / content_h;
    for (int oy = 0; oy < content_h; ++oy) {
        const double sy = (oy + 0.5) * step_y - 0.5;
        for (int ox = 0; ox < content_w; ++ox) {
            const double sx = (ox + 0.5) * step_x - 0.5;
            result.image.at(pad_left + ox, pad_top + oy) = bilinear_sample(image, sx, sy);
        }
    }
    return result;
}

ImageF crop_patch(const ImageF& image, const BBox& bbox, int out_size) {
    if (out_size < 1) raise(ErrorCode::BadConfig, "patch size must be positive");
    const double x0 = std::max(bbox.x, 0.0);
    const double y0 = std::max(bbox.y, 0.0);
    const double x1 = std::min(bbox.x + bbox.w, static_cast<double>(image.width));
    const double y1 = std::min(bbox.y + bbox.h, static_cast<double>(image.height));
    if (x1 <= x0 || y1 <= y0)
        raise(ErrorCode::DegenerateBox, "bbox does not intersect the image");

    ImageF out;
    out.width = out_size;
    out.height = out_size;
    out.pixels.resize(static_cast<std::size_t>(out_size) * out_size);
    const double step_x = (x1 - x0) / out_size;
    const double step_y = (y1 - y0) / out_size;
    for (int oy = 0; oy < out_size; ++oy) {
        const double sy = y0 + (oy + 0.5) * step_y - 0.5;
        for (int ox = 0; ox < out_size; ++ox) {
            const double sx = x0 + (ox + 0.5) * step_x - 0.5;
            out.at(ox, oy) = bilinear_sample(image, sx, sy);
        }
    }
    return out;
}

} // namespace evtk
