#include "metrics.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "error.hpp"

namespace evtk {
namespace {

// Input indices in score-descending order, equal scores keep input order.
std::vector<std::size_t> score_order(const std::vector<Detection>& dets) {
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&dets](std::size_t a, std::size_t b) {
        return dets[a].score > dets[b].score;
    });
    return order;
}

} // namespace

double iou(const BBox& a, const BBox& b) {
    const double ix = std::max(a.x, b.x);
    const double iy = std::max(a.y, b.y);
    const double ix2 = std::min(a.x + a.w, b.x + b.w);
    const double iy2 = std::min(a.y + a.h, b.y + b.h);
    const double iw = ix2 - ix;
    const double ih = iy2 - iy;
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

std::vector<Detection> nms(const std::vector<Detection>& dets, double iou_thr) {
    const auto order = score_order(dets);
    std::vector<bool> keep(dets.size(), false);
    // Suppression never crosses an image or class boundary: boxes from
    // different images occupy different planes.
    std::set<std::pair<std::int64_t, int>> groups;
    for (const Detection& d : dets) groups.insert({d.image_id, d.class_id});

    for (const auto& [image, cls] : groups) {
        std::vector<std::size_t> kept;
        for (std::size_t idx : order) {
            if (dets[idx].class_id != cls || dets[idx].image_id != image) continue;
            bool suppressed = false;
            for (std::size_t k : kept) {
                if (iou(dets[idx].bbox, dets[k].bbox) > iou_thr) {
                    suppressed = true;
                    break;
                }
            }
            if (!suppressed) {
                kept.push_back(idx);
                keep[idx] = true;
            }
        }
    }

    std::vector<Detection> out;
    for (std::size_t i = 0; i < dets.size(); ++i)
        if (keep[i]) out.push_back(dets[i]);
    return out;
}

MatchResult match_detections(const std::vector<Detection>& dets,
                             const std::vector<GroundTruth>& gts, double iou_thr) {
    MatchResult r;
    r.det_is_tp.assign(dets.size(), false);
    r.gt_matched.assign(gts.size(), false);

    for (std::size_t idx : score_order(dets)) {
        double best_iou = 0.0;
        std::size_t best_gt = gts.size();
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (r.gt_matched[g]) continue;
            const double v = iou(dets[idx].bbox, gts[g].bbox);
            if (v >= iou_thr && v > best_iou) {
                best_iou = v;
                best_gt = g;
            }
        }
        if (best_gt < gts.size()) {
            r.gt_matched[best_gt] = true;
            r.det_is_tp[idx] = true;
            ++r.tp;
        } else {
            ++r.fp;
        }
    }
    r.fn = gts.size() - r.tp;
    return r;
}

double average_precision(const std::vector<Detection>& dets,
                         const std::vector<GroundTruth>& gts, double iou_thr) {
    if (gts.empty()) return 0.0;

    std::map<std::int64_t, std::vector<std::size_t>> gts_by_image;
    for (std::size_t g = 0; g < gts.size(); ++g) gts_by_image[gts[g].image_id].push_back(g);

    std::vector<bool> gt_matched(gts.size(), false);
    std::vector<bool> tp_flags;
    tp_flags.reserve(dets.size());
    for (std::size_t idx : score_order(dets)) {
        const Detection& det = dets[idx];
        double best_iou = 0.0;
        std::size_t best_gt = gts.size();
        const auto it = gts_by_image.find(det.image_id);
        if (it != gts_by_image.end()) {
            for (std::size_t g : it->second) {
                if (gt_matched[g]) continue;
                const double v = iou(det.bbox, gts[g].bbox);
                if (v >= iou_thr && v > best_iou) {
                    best_iou = v;
                    best_gt = g;
                }
            }
        }
        if (best_gt < gts.size()) {
            gt_matched[best_gt] = true;
            tp_flags.push_back(true);
        } else {
            tp_flags.push_back(false);
        }
    }

    const double npos = static_cast<double>(gts.size());
    std::vector<double> precisions, recalls;
    precisions.reserve(tp_flags.size());
    recalls.reserve(tp_flags.size());
    std::size_t tp = 0;
    for (std::size_t k = 0; k < tp_flags.size(); ++k) {
        if (tp_flags[k]) ++tp;
        precisions.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
        recalls.push_back(static_cast<double>(tp) / npos);
    }

    // 101-point interpolation: at each recall level take the best precision
    // achieved at that recall or beyond.
    double sum = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double r = static_cast<double>(i) / 100.0;
        double best = 0.0;
        for (std::size_t k = 0; k < recalls.size(); ++k)
            if (recalls[k] >= r) best = std::max(best, precisions[k]);
        sum += best;
    }
    return sum / 101.0;
}

std::vector<double> coco_thresholds() {
    std::vector<double> out;
    for (int i = 0; i < 10; ++i) out.push_back(0.5 + 0.05 * static_cast<double>(i));
    return out;
}

double map_at(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
              const std::vector<double>& thresholds) {
    if (thresholds.empty()) raise(ErrorCode::BadConfig, "threshold list must be nonempty");

    std::set<int> classes;
    for (const GroundTruth& g : gts) classes.insert(g.class_id);
    if (classes.empty()) return 0.0;

    double class_sum = 0.0;
    for (int cls : classes) {
        std::vector<Detection> cls_dets;
        for (const Detection& d : dets)
            if (d.class_id == cls) cls_dets.push_back(d);
        std::vector<GroundTruth> cls_gts;
        for (const GroundTruth& g : gts)
            if (g.class_id == cls) cls_gts.push_back(g);

        double thr_sum = 0.0;
        for (double thr : thresholds) thr_sum += average_precision(cls_dets, cls_gts, thr);
        class_sum += thr_sum / static_cast<double>(thresholds.size());
    }
    return class_sum / static_cast<double>(classes.size());
}

double PrCounts::precision() const {
    const std::size_t denom = tp + fp;
    return denom == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(denom);
}

double PrCounts::recall() const {
    const std::size_t denom = tp + fn;
    return denom == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(denom);
}

double PrCounts::f1() const {
    const double p = precision();
    const double r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

PrCounts pr_counts(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                   double iou_thr) {
    std::set<std::int64_t> images;
    for (const Detection& d : dets) images.insert(d.image_id);
    for (const GroundTruth& g : gts) images.insert(g.image_id);

    PrCounts counts;
    for (std::int64_t img : images) {
        std::vector<Detection> img_dets;
        for (const Detection& d : dets)
            if (d.image_id == img) img_dets.push_back(d);
        std::vector<GroundTruth> img_gts;
        for (const GroundTruth& g : gts)
            if (g.image_id == img) img_gts.push_back(g);
        const MatchResult m = match_detections(img_dets, img_gts, iou_thr);
        counts.tp += m.tp;
        counts.fp += m.fp;
        counts.fn += m.fn;
    }
    return counts;
}

double f1_at_iou50(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts) {
    return pr_counts(dets, gts, 0.5).f1();
}

double accuracy(const std::vector<int>& preds, const std::vector<int>& truth) {
    if (preds.size() != truth.size())
        raise(ErrorCode::BadShape, "prediction and truth lists differ in length");
    if (preds.empty()) raise(ErrorCode::BadShape, "cannot score an empty prediction list");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        if (preds[i] == truth[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(preds.size());
}

EvalReport evaluate(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                    const EvalOptions& options) {
    EvalReport report;
    report.options = options;

    const std::vector<Detection> kept = options.nms_iou > 0.0 ? nms(dets, options.nms_iou) : dets;

    std::set<int> classes;
    for (const GroundTruth& g : gts) classes.insert(g.class_id);
    for (const Detection& d : kept) classes.insert(d.class_id);

    std::size_t scored_classes = 0;
    for (int cls : classes) {
        std::vector<Detection> cls_dets;
        for (const Detection& d : kept)
            if (d.class_id == cls) cls_dets.push_back(d);
        std::vector<GroundTruth> cls_gts;
        for (const GroundTruth& g : gts)
            if (g.class_id == cls) cls_gts.push_back(g);

        std::vector<Detection> confident;
        for (const Detection& d : cls_dets)
            if (d.score >= options.conf_threshold) confident.push_back(d);

        ClassMetrics m;
        m.gt_count = cls_gts.size();
        m.det_count = cls_dets.size();
        m.ap50 = average_precision(cls_dets, cls_gts, 0.5);
        double sweep = 0.0;
        for (double thr : coco_thresholds()) sweep += average_precision(cls_dets, cls_gts, thr);
        m.ap5095 = sweep / 10.0;
        const PrCounts counts = pr_counts(confident, cls_gts, 0.5);
        m.f1 = counts.f1();
        m.precision = counts.precision();
        m.recall = counts.recall();
        report.per_class[cls] = m;

        if (!cls_gts.empty()) {
            report.all.ap50 += m.ap50;
            report.all.ap5095 += m.ap5095;
            report.all.f1 += m.f1;
            report.all.precision += m.precision;
            report.all.recall += m.recall;
            ++scored_classes;
        }
        report.all.gt_count += m.gt_count;
        report.all.det_count += m.det_count;
    }
    if (scored_classes > 0) {
        const double n = static_cast<double>(scored_classes);
        report.all.ap50 /= n;
        report.all.ap5095 /= n;
        report.all.f1 /= n;
        report.all.precision /= n;
        report.all.recall /= n;
    }
    return report;
}

std::vector<GroundTruth> annotations_as_ground_truth(const std::vector<Annotation>& annotations) {
    std::vector<GroundTruth> out(annotations.size());
    for (std::size_t i = 0; i < annotations.size(); ++i) {
        out[i].image_id = annotations[i].t;
        out[i].class_id = annotations[i].class_id;
        out[i].bbox = annotations[i].bbox;
    }
    return out;
}

} // namespace evtk
