#pragma once

// Static SVG plots derived from trial logs:
//   * per-agent trajectory with the estimate rectangle of every step;
//   * per-step mean hull diameter and generator norm per algorithm.

#include "czest/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace czest::svg
{

inline const char* color_of(const std::string& alg)
{
    if (alg == "centralized") return "#1f77b4";
    if (alg == "oit") return "#2ca02c";
    if (alg == "distributed") return "#d62728";
    return "#555555";
}

class Canvas
{
    public:
        Canvas(double xmin, double xmax, double ymin, double ymax, int width = 640, int height = 480)
            : x0_(xmin), x1_(xmax), y0_(ymin), y1_(ymax), w_(width), h_(height)
        {
            if (!(x1_ > x0_)) x1_ = x0_ + 1.0;
            if (!(y1_ > y0_)) y1_ = y0_ + 1.0;
            body_ << "<rect x=\"0\" y=\"0\" width=\"" << w_ << "\" height=\"" << h_ << "\" fill=\"white\"/>\n";
            body_ << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << w_ - 2 * kPad << "\" height=\"" << h_ - 2 * kPad
                  << "\" fill=\"none\" stroke=\"#999\"/>\n";
        }

        double sx(double x) const { return kPad + (x - x0_) / (x1_ - x0_) * (w_ - 2 * kPad); }
        double sy(double y) const { return h_ - kPad - (y - y0_) / (y1_ - y0_) * (h_ - 2 * kPad); }

        void rect(double xlo, double xhi, double ylo, double yhi, const std::string& stroke)
        {
            body_ << "<rect x=\"" << num(sx(xlo)) << "\" y=\"" << num(sy(yhi)) << "\" width=\"" << num(sx(xhi) - sx(xlo))
                  << "\" height=\"" << num(sy(ylo) - sy(yhi)) << "\" fill=\"none\" stroke=\"" << stroke
                  << "\" stroke-width=\"0.8\"/>\n";
        }

        void dot(double x, double y, const std::string& fill = "black")
        {
            body_ << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y)) << "\" r=\"2.5\" fill=\"" << fill << "\"/>\n";
        }

        void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke, bool dashed = false)
        {
            body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\"" << (dashed ? " stroke-dasharray=\"5,3\"" : "")
                  << " points=\"";
            for (const auto& [x, y] : pts) body_ << num(sx(x)) << ',' << num(sy(y)) << ' ';
            body_ << "\"/>\n";
        }

        void text(double px, double py, const std::string& s, const std::string& fill = "black")
        {
            body_ << "<text x=\"" << num(px) << "\" y=\"" << num(py) << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
                  << fill << "\">" << s << "</text>\n";
        }

        void axes_labels(const std::string& title, const std::string& xlabel, const std::string& ylabel)
        {
            text(kPad, kPad - 12, title);
            text(w_ / 2.0, h_ - 12, xlabel);
            text(4, h_ / 2.0, ylabel);
            text(kPad, h_ - kPad + 16, num(x0_));
            text(w_ - kPad - 30, h_ - kPad + 16, num(x1_));
            text(4, h_ - kPad, num(y0_));
            text(4, kPad + 10, num(y1_));
        }

        std::string str() const
        {
            std::ostringstream out;
            out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_ << "\">\n"
                << body_.str() << "</svg>\n";
            return out.str();
        }

    private:
        static constexpr double kPad = 50.0;
        double x0_, x1_, y0_, y1_;
        int w_, h_;
        std::ostringstream body_;

        static std::string num(double v)
        {
            std::ostringstream s;
            s.precision(6);
            s << v;
            return s.str();
        }
};

// Plot coordinates of an agent block: positions (0, 2) for 4-D states,
// (0, 1) for 2-D states, and time against the scalar for 1-D states.
inline std::string trajectory_svg(const TrialLog& log, const MultiAgentSystem& sys, int agent)
{
    const int n = sys.agent(agent).n();
    const int off = sys.state_offset(agent);
    const bool timeplot = n == 1;
    const int cx = 0, cy = n >= 4 ? 2 : (n >= 2 ? 1 : 0);

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto grow = [&](double x, double y) {
        if (!std::isfinite(x) || !std::isfinite(y)) return;
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    };
    auto extent = [&](const StepRecord& s, const Box& b) {
        if (timeplot) grow(s.k, b.lo(0)), grow(s.k, b.hi(0));
        else grow(b.lo(cx), b.lo(cy)), grow(b.hi(cx), b.hi(cy));
    };
    for (const auto& s : log.steps)
    {
        if (timeplot) grow(s.k, s.truth(off));
        else grow(s.truth(off + cx), s.truth(off + cy));
        for (const auto& [alg, est] : s.estimates) extent(s, est[static_cast<size_t>(agent - 1)].hull);
    }
    if (xmin > xmax) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    const double mx = 0.05 * (xmax - xmin) + 0.5, my = 0.05 * (ymax - ymin) + 0.5;
    Canvas cv(xmin - mx, xmax + mx, ymin - my, ymax + my);

    for (const auto& s : log.steps)
    {
        for (const auto& [alg, est] : s.estimates)
        {
            const Box& b = est[static_cast<size_t>(agent - 1)].hull;
            if (timeplot) cv.rect(s.k - 0.3, s.k + 0.3, b.lo(0), b.hi(0), color_of(alg));
            else if (b.is_bounded()) cv.rect(b.lo(cx), b.hi(cx), b.lo(cy), b.hi(cy), color_of(alg));
        }
    }
    std::vector<std::pair<double, double>> path;
    for (const auto& s : log.steps)
    {
        const double x = timeplot ? s.k : s.truth(off + cx);
        const double y = timeplot ? s.truth(off) : s.truth(off + cy);
        path.emplace_back(x, y);
        cv.dot(x, y);
    }
    cv.polyline(path, "black");
    cv.axes_labels("agent " + std::to_string(agent) + " (trial " + std::to_string(log.trial) + ")", timeplot ? "k" : "x",
                   timeplot ? "x" : "y");
    int row = 0;
    for (const auto& s : log.steps.empty() ? std::map<std::string, std::vector<AgentEstimate>>{} : log.steps.front().estimates)
        cv.text(520, 20 + 14 * row++, s.first, color_of(s.first));
    return cv.str();
}

// Mean diameter (solid) and mean generator norm (dashed) per algorithm.
inline std::string metrics_svg(const MonteCarloResult& mc)
{
    double ymax = 0.0;
    size_t kmax = 1;
    for (const auto& [alg, series] : mc.per_step)
    {
        kmax = std::max(kmax, series.size());
        for (const auto& a : series)
            if (std::isfinite(a.mean_d)) ymax = std::max(ymax, a.mean_d);
    }
    Canvas cv(0, static_cast<double>(kmax - 1), 0, ymax * 1.05 + 1e-9);
    int row = 0;
    for (const auto& [alg, series] : mc.per_step)
    {
        std::vector<std::pair<double, double>> d, g;
        for (size_t k = 0; k < series.size(); ++k)
        {
            if (!std::isfinite(series[k].mean_d)) continue;
            d.emplace_back(static_cast<double>(k), series[k].mean_d);
            g.emplace_back(static_cast<double>(k), series[k].mean_gnorm);
        }
        cv.polyline(d, color_of(alg));
        cv.polyline(g, color_of(alg), true);
        cv.text(480, 20 + 14 * row++, alg + " (d solid, |G| dashed)", color_of(alg));
    }
    cv.axes_labels("mean hull diameter and generator norm", "k", "");
    return cv.str();
}

} // namespace czest::svg
