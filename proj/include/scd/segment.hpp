// Change-point extraction over one conversation: classify every window and
// report the boundary time of each detection as the midpoint between the two
// window halves.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "scd/common.hpp"
#include "scd/corpus.hpp"
#include "scd/embeddings.hpp"
#include "scd/features.hpp"
#include "scd/nn.hpp"

namespace scd {

struct ChangePoint {
    std::size_t window_index = 1;  // 1-based window position
    double time = 0.0;             // midpoint of the inter-half gap
    double p_split = 0.0;
};

// Window size implied by the model's input width given the table dimension.
inline std::size_t window_size_for(const Model& model, const EmbeddingTable& table) {
    const std::size_t in = model.input_dim();
    if (in < 2 * table.dim() + 3 || (in - 2 * table.dim() - 1) % 2 != 0)
        throw ValidationError("model input width " + std::to_string(in) +
                              " does not fit any window size at embedding dimension " +
                              std::to_string(table.dim()));
    return (in - 2 * table.dim() - 1) / 2;
}

// Runs the classifier over all windows and keeps those with
// p_split > threshold. Detections at exactly equal times collapse to the
// most probable one, so emitted times are strictly increasing. An optional
// suppression radius then greedily keeps probability maxima and drops other
// detections within `radius` seconds of a kept one.
inline std::vector<ChangePoint> detect_change_points(const Model& model,
                                                     const Conversation& conv,
                                                     const EmbeddingTable& table,
                                                     double threshold = 0.5,
                                                     std::optional<double> nms_radius = {}) {
    const std::size_t w = window_size_for(model, table);
    const auto windows = make_windows(conv, w);
    std::vector<ChangePoint> points;
    if (windows.empty()) return points;

    Matrix features(windows.size(), feature_length(table.dim(), w));
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto values = encode_window(windows[i], table);
        std::copy(values.begin(), values.end(), features.row(i).begin());
    }
    const auto probs = predict(model, features);

    const std::size_t half = w / 2;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (!(probs[i].p_split > threshold)) continue;
        const double left_end = windows[i].tokens[half - 1].end;
        const double right_start = windows[i].tokens[half].start;
        ChangePoint cp{windows[i].index, (left_end + right_start) / 2.0, probs[i].p_split};
        if (!points.empty() && points.back().time == cp.time) {
            if (cp.p_split > points.back().p_split) points.back() = cp;
            continue;
        }
        points.push_back(cp);
    }

    if (nms_radius && *nms_radius > 0.0 && points.size() > 1) {
        std::vector<std::size_t> order(points.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (points[a].p_split != points[b].p_split)
                return points[a].p_split > points[b].p_split;
            return points[a].time < points[b].time;
        });
        std::vector<ChangePoint> kept;
        for (std::size_t i : order) {
            const bool suppressed =
                std::any_of(kept.begin(), kept.end(), [&](const ChangePoint& k) {
                    return std::abs(k.time - points[i].time) <= *nms_radius;
                });
            if (!suppressed) kept.push_back(points[i]);
        }
        std::sort(kept.begin(), kept.end(),
                  [](const ChangePoint& a, const ChangePoint& b) { return a.time < b.time; });
        points = std::move(kept);
    }
    return points;
}

inline std::string serialize_change_points(const std::vector<ChangePoint>& points) {
    std::string out = "time,probability\n";
    for (const ChangePoint& p : points)
        out += format_double(p.time) + "," + format_double(p.p_split) + "\n";
    return out;
}

}  // namespace scd
