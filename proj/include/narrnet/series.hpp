#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "narrnet/common.hpp"

namespace narrnet {

// Dated scalar measurements with strictly increasing days and finite values.
class TimeSeries {
public:
    struct Point {
        Day day;
        double value;
    };

    // Throws std::invalid_argument on a non-increasing day or non-finite value.
    void push_back(Day day, double value);

    const std::vector<Point>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    std::optional<double> at(Day day) const;

    std::size_t smoothing_width = 1;

private:
    std::vector<Point> points_;
};

// Centered moving average over `width` days (odd); days missing from the
// series and days beyond its ends are left out of each average.
TimeSeries smooth(const TimeSeries& series, std::size_t width = 5);

void write_series_csv(std::ostream& out, const TimeSeries& series,
                      const char* value_name = "value");

}  // namespace narrnet
