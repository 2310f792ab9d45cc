#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "rmdp/bench.hpp"

namespace rmdp::bench {

namespace {

constexpr double kPanelWidth = 440;
constexpr double kHeight = 470;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 60;
constexpr double kBottom = 120;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};

std::string fixed(double x, int digits = 2) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char ch : text) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += ch;
        }
    }
    return out;
}

bool relative_family(Method m) { return m == Method::RobustRvi || m == Method::NonrobustRvi; }

struct Frame {
    double x0;
    double t_max;
    double y_lo;
    double y_hi;
    double width() const { return kPanelWidth - kLeft - kRight; }
    double height() const { return kHeight - kTop - kBottom; }
    double px(double t) const { return x0 + kLeft + width() * t / t_max; }
    double py(double y) const { return kTop + height() * (1.0 - (y - y_lo) / (y_hi - y_lo)); }
};

void draw_axes(std::ostringstream& svg, const Frame& f, const std::string& title) {
    const double left = f.x0 + kLeft;
    const double bottom = kTop + f.height();
    svg << "<text x=\"" << fixed(left + f.width() / 2) << "\" y=\"" << kTop - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(title) << "</text>\n";
    svg << "<path d=\"M" << fixed(left) << ' ' << fixed(kTop) << " V" << fixed(bottom) << " H"
        << fixed(left + f.width()) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double t = std::round(f.t_max * i / 4.0);
        const double y = f.y_lo + (f.y_hi - f.y_lo) * i / 4.0;
        svg << "<line x1=\"" << fixed(f.px(t)) << "\" y1=\"" << fixed(bottom) << "\" x2=\"" << fixed(f.px(t))
            << "\" y2=\"" << fixed(bottom + 5) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << fixed(f.px(t)) << "\" y=\"" << fixed(bottom + 18) << "\" text-anchor=\"middle\">"
            << static_cast<long long>(t) << "</text>\n";
        svg << "<line x1=\"" << fixed(left - 5) << "\" y1=\"" << fixed(f.py(y)) << "\" x2=\"" << fixed(left)
            << "\" y2=\"" << fixed(f.py(y)) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << fixed(left - 8) << "\" y=\"" << fixed(f.py(y) + 4) << "\" text-anchor=\"end\">"
            << fixed(y, 3) << "</text>\n";
    }
    svg << "<text x=\"" << fixed(left + f.width() / 2) << "\" y=\"" << fixed(bottom + 38)
        << "\" text-anchor=\"middle\">iteration t</text>\n";
    svg << "<text transform=\"translate(" << fixed(f.x0 + 18) << ' ' << fixed(kTop + f.height() / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">robust average reward</text>\n";
}

} // namespace

std::string render_svg(const std::vector<ExperimentRow>& rows, const std::vector<Method>& methods,
                       const std::string& title) {
    std::vector<std::vector<std::size_t>> panels(2);
    for (std::size_t k = 0; k < methods.size(); ++k) panels[relative_family(methods[k]) ? 1 : 0].push_back(k);
    std::erase_if(panels, [](const auto& p) { return p.empty(); });
    if (panels.empty()) panels.push_back({});

    double t_max = 1.0;
    double y_lo = std::numeric_limits<double>::infinity();
    double y_hi = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        t_max = std::max(t_max, static_cast<double>(r.t));
        y_lo = std::min(y_lo, r.robust_avg_reward);
        y_hi = std::max(y_hi, r.robust_avg_reward);
    }
    if (!std::isfinite(y_lo)) {
        y_lo = 0.0;
        y_hi = 1.0;
    }
    const double pad = std::max(1e-3, 0.05 * (y_hi - y_lo));
    y_lo -= pad;
    y_hi += pad;

    const double width = kPanelWidth * static_cast<double>(panels.size());
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << width << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << fixed(width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
        << "</text>\n";

    for (std::size_t panel = 0; panel < panels.size(); ++panel) {
        const Frame frame{kPanelWidth * static_cast<double>(panel), t_max, y_lo, y_hi};
        const bool relative = !panels[panel].empty() && relative_family(methods[panels[panel].front()]);
        draw_axes(svg, frame, relative ? "relative value iteration" : "value iteration");

        for (std::size_t slot = 0; slot < panels[panel].size(); ++slot) {
            const std::size_t k = panels[panel][slot];
            const char* colour = kPalette[k % std::size(kPalette)];
            const char* dash = is_robust(methods[k]) ? "" : " stroke-dasharray=\"6 3\"";
            std::map<std::uint64_t, std::vector<const ExperimentRow*>> per_seed;
            std::map<std::size_t, std::pair<double, std::size_t>> mean;
            for (const auto& r : rows) {
                if (r.method != methods[k]) continue;
                per_seed[r.seed].push_back(&r);
                auto& [sum, n] = mean[r.t];
                sum += r.robust_avg_reward;
                ++n;
            }
            if (per_seed.size() > 1) {
                for (const auto& [seed, series] : per_seed) {
                    svg << "<polyline fill=\"none\" stroke=\"" << colour
                        << "\" stroke-opacity=\"0.2\" stroke-width=\"1\"" << dash << " points=\"";
                    for (const auto* r : series) {
                        svg << fixed(frame.px(static_cast<double>(r->t))) << ',' << fixed(frame.py(r->robust_avg_reward))
                            << ' ';
                    }
                    svg << "\"/>\n";
                }
            }
            svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2.2\"" << dash << " points=\"";
            for (const auto& [t, sn] : mean) {
                if (sn.second != per_seed.size()) continue;
                svg << fixed(frame.px(static_cast<double>(t))) << ','
                    << fixed(frame.py(sn.first / static_cast<double>(sn.second))) << ' ';
            }
            svg << "\"/>\n";

            const double lx = frame.x0 + kLeft + 10;
            const double ly = kHeight - kBottom + 62 + 18.0 * static_cast<double>(slot);
            svg << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(lx + 28)
                << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << colour << "\" stroke-width=\"2.2\"" << dash << "/>\n";
            svg << "<text x=\"" << fixed(lx + 34) << "\" y=\"" << fixed(ly + 4) << "\">"
                << escape(to_string(methods[k]) + (per_seed.size() > 1 ? " (mean; faint: per seed)" : ""))
                << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace rmdp::bench
