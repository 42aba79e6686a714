#pragma once

#include "meshtopo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace meshtopo {

/// Uniform bucket grid over a point set for exact radius queries.
class SpatialIndex {
public:
    explicit SpatialIndex(std::span<const Point> points) : points_(points.begin(), points.end())
    {
        if (points_.empty()) return;
        minx_ = maxx_ = points_[0].x;
        miny_ = maxy_ = points_[0].y;
        for (const Point& p : points_) {
            minx_ = std::min(minx_, p.x);
            maxx_ = std::max(maxx_, p.x);
            miny_ = std::min(miny_, p.y);
            maxy_ = std::max(maxy_, p.y);
        }
        const double w = static_cast<double>(maxx_ - minx_) + 1.0;
        const double h = static_cast<double>(maxy_ - miny_) + 1.0;
        const double cells = std::max(1.0, static_cast<double>(points_.size()) / 2.0);
        cell_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::sqrt(w * h / cells))));
        for (;;) {
            cols_ = static_cast<std::size_t>((maxx_ - minx_) / cell_ + 1);
            rows_ = static_cast<std::size_t>((maxy_ - miny_) / cell_ + 1);
            if (cols_ * rows_ <= 4 * points_.size() + 16) break;
            cell_ *= 2;
        }
        start_.assign(cols_ * rows_ + 1, 0);
        for (const Point& p : points_) ++start_[bucket(p) + 1];
        for (std::size_t i = 1; i < start_.size(); ++i) start_[i] += start_[i - 1];
        order_.resize(points_.size());
        std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
        for (std::size_t i = 0; i < points_.size(); ++i) order_[fill[bucket(points_[i])]++] = i;
    }

    /// Calls f(index) for every point with squared distance to `center` <= r2.
    template <class F>
    void within(const Point& center, i128 r2, F&& f) const
    {
        if (points_.empty() || r2 < 0) return;
        const auto r = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<long double>(r2))));
        const std::int64_t cx0 = std::max<std::int64_t>(0, (center.x - r - minx_) / cell_ - 1);
        const std::int64_t cy0 = std::max<std::int64_t>(0, (center.y - r - miny_) / cell_ - 1);
        const std::int64_t cx1 = std::min<std::int64_t>(static_cast<std::int64_t>(cols_) - 1, (center.x + r - minx_) / cell_ + 1);
        const std::int64_t cy1 = std::min<std::int64_t>(static_cast<std::int64_t>(rows_) - 1, (center.y + r - miny_) / cell_ + 1);
        for (std::int64_t cy = cy0; cy <= cy1; ++cy) {
            for (std::int64_t cx = cx0; cx <= cx1; ++cx) {
                const std::size_t b = static_cast<std::size_t>(cy) * cols_ + static_cast<std::size_t>(cx);
                for (std::size_t k = start_[b]; k < start_[b + 1]; ++k) {
                    const std::size_t i = order_[k];
                    if (squared_distance(points_[i], center) <= r2) f(i);
                }
            }
        }
    }

private:
    std::size_t bucket(const Point& p) const
    {
        const auto cx = static_cast<std::size_t>((p.x - minx_) / cell_);
        const auto cy = static_cast<std::size_t>((p.y - miny_) / cell_);
        return cy * cols_ + cx;
    }

    std::vector<Point> points_;
    std::int64_t minx_ = 0, maxx_ = 0, miny_ = 0, maxy_ = 0;
    std::int64_t cell_ = 1;
    std::size_t cols_ = 1, rows_ = 1;
    std::vector<std::size_t> start_;
    std::vector<std::size_t> order_;
};

}  // namespace meshtopo
