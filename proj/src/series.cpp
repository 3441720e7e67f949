#include "narrnet/series.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace narrnet {

void TimeSeries::push_back(Day day, double value) {
    if (!points_.empty() && day <= points_.back().day)
        throw std::invalid_argument("time series days must be strictly increasing");
    if (!std::isfinite(value)) throw std::invalid_argument("time series value must be finite");
    points_.push_back({day, value});
}

std::optional<double> TimeSeries::at(Day day) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), day,
                               [](const Point& p, Day d) { return p.day < d; });
    if (it == points_.end() || it->day != day) return std::nullopt;
    return it->value;
}

TimeSeries smooth(const TimeSeries& series, std::size_t width) {
    if (width == 0 || width % 2 == 0) throw std::invalid_argument("smoothing width must be odd");
    const auto half = std::chrono::days{static_cast<int>(width / 2)};
    const auto& pts = series.points();
    TimeSeries out;
    out.smoothing_width = width;
    std::size_t lo = 0;
    std::size_t hi = 0;
    double sum = 0.0;
    for (const auto& p : pts) {
        while (hi < pts.size() && pts[hi].day <= p.day + half) sum += pts[hi++].value;
        while (pts[lo].day < p.day - half) sum -= pts[lo++].value;
        out.push_back(p.day, sum / static_cast<double>(hi - lo));
    }
    return out;
}

void write_series_csv(std::ostream& out, const TimeSeries& series, const char* value_name) {
    out << "date," << value_name << '\n';
    for (const auto& p : series.points()) out << format_day(p.day) << ',' << fmt::format("{}", p.value) << '\n';
}

}  // namespace narrnet
