#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "types.hpp"

namespace evtk {

/// Detection evaluation: IoU, NMS, greedy matching, interpolated AP, F1,
/// and classification accuracy.

struct GroundTruth {
    std::int64_t image_id = 0;
    int class_id = 0;
    BBox bbox;
};

double iou(const BBox& a, const BBox& b);

/// Per-class greedy suppression: keep the highest-scoring remaining box,
/// drop others overlapping it with IoU strictly above iou_thr. Ties break
/// by input order. Output preserves input order of the kept boxes.
std::vector<Detection> nms(const std::vector<Detection>& dets, double iou_thr = 0.4);

/// Greedy matching of one detection pool against one ground-truth pool
/// (callers group by class and image). Detections are taken in score-descending
/// order (ties by input order); each matches the unmatched GT with highest
/// IoU >= iou_thr, first index on IoU ties.
struct MatchResult {
    std::vector<bool> det_is_tp;  // aligned with input det order
    std::vector<bool> gt_matched; // aligned with input gt order
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

MatchResult match_detections(const std::vector<Detection>& dets,
                             const std::vector<GroundTruth>& gts, double iou_thr);

/// Single-class AP across images at one IoU threshold: score-descending
/// greedy matching per image, cumulative precision/recall, 101-point
/// interpolated mean of the running-max precision envelope. Zero GT yields 0.
double average_precision(const std::vector<Detection>& dets,
                         const std::vector<GroundTruth>& gts, double iou_thr);

/// The ten-threshold sweep 0.50, 0.55, ..., 0.95.
std::vector<double> coco_thresholds();

/// Mean over classes (those with ground truth) of the mean over thresholds
/// of single-class AP. Inputs may span classes and images.
double map_at(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
              const std::vector<double>& thresholds);

struct PrCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    double precision() const;
    double recall() const;
    double f1() const;
};

/// Single-class TP/FP/FN across images under the greedy matching rule.
PrCounts pr_counts(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                   double iou_thr);

/// F1 at IoU 0.5 over a single-class pool.
double f1_at_iou50(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts);

/// Fraction of positions where both sequences agree. Lengths must match and
/// be nonzero.
double accuracy(const std::vector<int>& preds, const std::vector<int>& truth);

// --- report assembly ------------------------------------------------------

struct EvalOptions {
    double conf_threshold = 0.2; // applied to F1/precision/recall only
    double nms_iou = 0.4;        // <= 0 disables suppression
};

struct ClassMetrics {
    double ap50 = 0.0;
    double ap5095 = 0.0;
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    std::size_t gt_count = 0;
    std::size_t det_count = 0; // post-NMS, pre-confidence-filter
};

struct EvalReport {
    std::map<int, ClassMetrics> per_class;
    ClassMetrics all; // unweighted mean over classes with ground truth
    EvalOptions options;
};

/// Full pipeline: NMS, AP on every surviving detection, F1/precision/recall
/// on those at or above the confidence threshold. "all" averages classes
/// that have ground truth.
EvalReport evaluate(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                    const EvalOptions& options = {});

/// Ground truth rows from an annotation list; the annotation timestamp
/// doubles as the image id.
std::vector<GroundTruth> annotations_as_ground_truth(const std::vector<Annotation>& annotations);

} // namespace evtk
