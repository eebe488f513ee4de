#include "ale/harness/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ale::harness {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

void write_cluster_svg(const std::string& path, const std::vector<cplx>& points) {
    if (points.empty()) throw std::invalid_argument("write_cluster_svg: empty trace");
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const cplx& w : points) {
        xmin = std::min(xmin, w.real());
        xmax = std::max(xmax, w.real());
        ymin = std::min(ymin, w.imag());
        ymax = std::max(ymax, w.imag());
    }
    const double pad = 0.05 * std::max(xmax - xmin, ymax - ymin);
    const double w = xmax - xmin + 2 * pad, h = ymax - ymin + 2 * pad;
    const double stroke = 0.0015 * std::max(w, h);

    std::ofstream out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << num(xmin - pad) << " "
        << num(-(ymax + pad)) << " " << num(w) << " " << num(h) << "\">\n";
    out << "<polyline fill=\"none\" stroke=\"#1f4e8c\" stroke-width=\"" << num(stroke)
        << "\" points=\"";
    // SVG's y axis points down; flip
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) out << ' ';
        out << num(points[i].real()) << ',' << num(-points[i].imag());
    }
    out << "\"/>\n</svg>\n";
}

void write_angles_svg(const std::string& path, const std::vector<double>& angles) {
    if (angles.empty()) throw std::invalid_argument("write_angles_svg: empty sequence");
    double ymin = 0.0, ymax = 0.0;
    for (double a : angles) {
        ymin = std::min(ymin, a);
        ymax = std::max(ymax, a);
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 1e-12;
        ymax += 1e-12;
    }
    const double width = 960.0, height = 480.0, margin = 40.0;
    const double n = static_cast<double>(angles.size());
    auto px = [&](double k) { return margin + (width - 2 * margin) * k / n; };
    auto py = [&](double a) {
        return height - margin - (height - 2 * margin) * (a - ymin) / (ymax - ymin);
    };

    std::ofstream out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << num(width) << " "
        << num(height) << "\">\n";
    if (ymin < 0.0 && ymax > 0.0)
        out << "<line stroke=\"#bbbbbb\" stroke-width=\"1\" x1=\"" << num(margin) << "\" y1=\""
            << num(py(0.0)) << "\" x2=\"" << num(width - margin) << "\" y2=\"" << num(py(0.0))
            << "\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"#b03030\" stroke-width=\"1.2\" points=\"";
    // step plot: hold each theta_k until the next index
    for (std::size_t k = 0; k < angles.size(); ++k) {
        if (k) out << ' ';
        out << num(px(static_cast<double>(k))) << ',' << num(py(angles[k])) << ' '
            << num(px(static_cast<double>(k + 1))) << ',' << num(py(angles[k]));
    }
    out << "\"/>\n";
    out << "<text x=\"" << num(margin) << "\" y=\"" << num(margin - 10)
        << "\" font-size=\"14\" fill=\"#333333\">theta range [" << num(ymin) << ", " << num(ymax)
        << "], n=" << angles.size() << "</text>\n";
    out << "</svg>\n";
}

double principal_aspect_ratio(const std::vector<cplx>& points, double exclude_radius) {
    double sx = 0, sy = 0;
    std::size_t n = 0;
    for (const cplx& w : points) {
        if (std::abs(w) <= exclude_radius) continue;
        sx += w.real();
        sy += w.imag();
        ++n;
    }
    if (n < 3) return 1.0;
    const double mx = sx / n, my = sy / n;
    double cxx = 0, cxy = 0, cyy = 0;
    for (const cplx& w : points) {
        if (std::abs(w) <= exclude_radius) continue;
        const double dx = w.real() - mx, dy = w.imag() - my;
        cxx += dx * dx;
        cxy += dx * dy;
        cyy += dy * dy;
    }
    cxx /= n;
    cxy /= n;
    cyy /= n;
    const double tr = cxx + cyy;
    const double disc = std::sqrt(std::max(0.0, (cxx - cyy) * (cxx - cyy) + 4 * cxy * cxy));
    const double l1 = 0.5 * (tr + disc), l2 = 0.5 * (tr - disc);
    if (!(l2 > 0.0)) return 1e9;
    return std::sqrt(l1 / l2);
}

}  // namespace ale::harness
