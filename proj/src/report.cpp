#include "lutbench/report.hpp"

#include "lutbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

namespace lutbench {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string label(const EvalReport& r) {
    return r.method + " @ " + std::to_string(r.lut_size);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// NaN is not representable in JSON; it is written as null.
json numbers(const std::vector<double>& v) {
    json a = json::array();
    for (double d : v) a.push_back(std::isfinite(d) ? json(d) : json(nullptr));
    return a;
}

std::vector<double> numbers_from(const json& a) {
    std::vector<double> v;
    for (const auto& e : a)
        v.push_back(e.is_null() ? std::numeric_limits<double>::quiet_NaN() : e.get<double>());
    return v;
}

}  // namespace

json report_to_json(const EvalReport& r) {
    json pct = json::object();
    for (std::size_t i = 0; i < std::size(kResidualPercentiles); ++i) {
        const auto row = r.percentiles.row(i);
        pct[fmt(kResidualPercentiles[i])] = numbers({row.begin(), row.end()});
    }
    return {{"method", r.method},
            {"lut_size", r.lut_size},
            {"components", r.components},
            {"nrmse_norm", r.nrmse_norm},
            {"rmse_mean", r.rmse_mean},
            {"nrmse_mean", r.nrmse_mean},
            {"nrmse_degenerate", r.nrmse_degenerate},
            {"residual_excluded", r.residual_excluded},
            {"evaluated", r.evaluated},
            {"failed", r.failed},
            {"build_seconds", r.build_seconds},
            {"query_seconds", r.query_seconds},
            {"wavelengths", numbers(r.wavelengths)},
            {"rmse", numbers(r.rmse)},
            {"nrmse", numbers(r.nrmse)},
            {"mean_relative", numbers(r.mean_relative)},
            {"percentiles", pct}};
}

EvalReport report_from_json(const json& j) {
    try {
        EvalReport r;
        r.method = j.at("method").get<std::string>();
        r.lut_size = j.at("lut_size").get<std::size_t>();
        r.components = j.at("components").get<std::size_t>();
        r.nrmse_norm = j.at("nrmse_norm").get<std::string>();
        r.rmse_mean = j.at("rmse_mean").get<double>();
        r.nrmse_mean = j.at("nrmse_mean").get<double>();
        r.nrmse_degenerate = j.at("nrmse_degenerate").get<std::size_t>();
        r.residual_excluded = j.at("residual_excluded").get<std::size_t>();
        r.evaluated = j.at("evaluated").get<std::size_t>();
        r.failed = j.at("failed").get<std::size_t>();
        r.build_seconds = j.at("build_seconds").get<double>();
        r.query_seconds = j.at("query_seconds").get<double>();
        r.wavelengths = numbers_from(j.at("wavelengths"));
        r.rmse = numbers_from(j.at("rmse"));
        r.nrmse = numbers_from(j.at("nrmse"));
        r.mean_relative = numbers_from(j.at("mean_relative"));
        const auto& pct = j.at("percentiles");
        r.percentiles = Matrix(std::size(kResidualPercentiles), r.wavelengths.size());
        for (std::size_t i = 0; i < std::size(kResidualPercentiles); ++i) {
            const auto v = numbers_from(pct.at(fmt(kResidualPercentiles[i])));
            if (v.size() != r.wavelengths.size()) throw FormatError("percentile curve length mismatch");
            std::copy(v.begin(), v.end(), r.percentiles.row(i).begin());
        }
        return r;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed report: ") + e.what());
    }
}

void write_text(const std::string& text, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (path.empty() || !os) throw IoError("cannot open '" + path + "' for writing");
    os << text;
    if (!os) throw IoError("write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void write_report_json(const EvalReport& r, const std::string& path) {
    write_text(report_to_json(r).dump(2) + "\n", path);
}

void write_report_csv(const EvalReport& r, const std::string& path) {
    std::ostringstream os;
    os << "wavelength_nm,rmse,nrmse_percent,mean_relative_percent";
    for (double q : kResidualPercentiles) os << ",p" << fmt(q);
    os << '\n';
    for (std::size_t k = 0; k < r.wavelengths.size(); ++k) {
        os << fmt(r.wavelengths[k]) << ',' << fmt(r.rmse[k]) << ',' << fmt(r.nrmse[k]) << ','
           << fmt(r.mean_relative[k]);
        for (std::size_t i = 0; i < r.percentiles.rows(); ++i) os << ',' << fmt(r.percentiles(i, k));
        os << '\n';
    }
    write_text(os.str(), path);
}

void write_summary_csv(const std::vector<EvalReport>& reports, const std::string& path) {
    std::ostringstream os;
    bool first = true;
    for (const char* c : kSummaryColumns) {
        os << (first ? "" : ",") << c;
        first = false;
    }
    os << '\n';
    for (const auto& r : reports) {
        os << r.method << ',' << r.lut_size << ',' << r.components << ',' << fmt(r.rmse_mean) << ','
           << fmt(r.nrmse_mean) << ',' << r.evaluated << ',' << r.failed << ',' << fmt(r.build_seconds)
           << ',' << fmt(r.query_seconds) << ',' << fmt(r.build_seconds + r.query_seconds) << '\n';
    }
    write_text(os.str(), path);
}

std::string summary_text(const std::vector<EvalReport>& reports) {
    std::vector<std::vector<std::string>> rows = {
        {"method", "LUT", "PCs", "RMSE", "NRMSE %", "failed", "build s", "query s"}};
    for (const auto& r : reports) {
        rows.push_back({r.method, std::to_string(r.lut_size),
                        r.components ? std::to_string(r.components) : "-", fixed(r.rmse_mean, 6),
                        fixed(r.nrmse_mean, 4), std::to_string(r.failed), fixed(r.build_seconds, 3),
                        fixed(r.query_seconds, 3)});
    }
    std::vector<std::size_t> width(rows.front().size(), 0);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    std::ostringstream os;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t c = 0; c < rows[i].size(); ++c) {
            const auto& cell = rows[i][c];
            const std::string pad(width[c] - cell.size(), ' ');
            if (c == 0) os << cell << pad;
            else os << "  " << pad << cell;
        }
        os << '\n';
        if (i == 0) {
            std::size_t total = 0;
            for (auto w : width) total += w + 2;
            os << std::string(total - 2, '-') << '\n';
        }
    }
    return os.str();
}

std::string residual_figure_svg(const std::vector<EvalReport>& reports) {
    constexpr double kW = 720.0;
    constexpr double kPanelH = 220.0;
    constexpr double kLeft = 70.0;
    constexpr double kRight = 20.0;
    constexpr double kTop = 30.0;
    constexpr double kBottom = 40.0;
    const double height = static_cast<double>(reports.size()) * kPanelH + 20.0;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<!-- relative residual |pred - ref| / ref in percent; columns: wavelength_nm,mean";
    for (double q : kResidualPercentiles) os << ",p" << fmt(q);
    os << " -->\n";

    for (std::size_t p = 0; p < reports.size(); ++p) {
        const auto& r = reports[p];
        const std::size_t k_count = r.wavelengths.size();
        os << "<!-- data " << label(r) << "\n";
        for (std::size_t k = 0; k < k_count; ++k) {
            os << fmt(r.wavelengths[k]) << ',' << fmt(r.mean_relative[k]);
            for (std::size_t i = 0; i < r.percentiles.rows(); ++i) os << ',' << fmt(r.percentiles(i, k));
            os << '\n';
        }
        os << "-->\n";
        if (k_count < 2) continue;

        const double y0 = static_cast<double>(p) * kPanelH;
        const double plot_h = kPanelH - kTop - kBottom;
        const double plot_w = kW - kLeft - kRight;
        double ymax = 0.0;
        for (double v : r.percentiles.data())
            if (std::isfinite(v)) ymax = std::max(ymax, v);
        if (!(ymax > 0.0)) ymax = 1.0;
        const double xmin = r.wavelengths.front();
        const double xmax = r.wavelengths.back();
        auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
        auto sy = [&](double y) {
            return y0 + kTop + plot_h - std::clamp(y, 0.0, ymax) / ymax * plot_h;
        };
        auto band = [&](std::size_t lo, std::size_t hi, const char* color) {
            os << "<polygon fill=\"" << color << "\" stroke=\"none\" points=\"";
            for (std::size_t k = 0; k < k_count; ++k)
                os << fixed(sx(r.wavelengths[k]), 2) << ',' << fixed(sy(r.percentiles(hi, k)), 2) << ' ';
            for (std::size_t k = k_count; k-- > 0;)
                os << fixed(sx(r.wavelengths[k]), 2) << ',' << fixed(sy(r.percentiles(lo, k)), 2) << ' ';
            os << "\"/>\n";
        };

        os << "<g>\n<text x=\"" << kLeft << "\" y=\"" << y0 + 18 << "\" font-weight=\"bold\">"
           << label(r) << "</text>\n";
        os << "<rect x=\"" << kLeft << "\" y=\"" << y0 + kTop << "\" width=\"" << plot_w
           << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
        band(0, 3, "#c6dbef");
        band(1, 2, "#6baed6");
        os << "<polyline fill=\"none\" stroke=\"#08306b\" stroke-width=\"1.2\" points=\"";
        for (std::size_t k = 0; k < k_count; ++k)
            if (std::isfinite(r.mean_relative[k]))
                os << fixed(sx(r.wavelengths[k]), 2) << ',' << fixed(sy(r.mean_relative[k]), 2) << ' ';
        os << "\"/>\n";
        for (int t = 0; t <= 4; ++t) {
            const double v = ymax * t / 4.0;
            os << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed(sy(v) + 4, 2)
               << "\" text-anchor=\"end\">" << fixed(v, 3) << "</text>\n";
        }
        for (int t = 0; t <= 4; ++t) {
            const double v = xmin + (xmax - xmin) * t / 4.0;
            os << "<text x=\"" << fixed(sx(v), 2) << "\" y=\"" << y0 + kTop + plot_h + 14
               << "\" text-anchor=\"middle\">" << fixed(v, 0) << "</text>\n";
        }
        os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << y0 + kPanelH - 8
           << "\" text-anchor=\"middle\">wavelength (nm); relative residual (%), mean and "
              "2.5-95.5 / 16-84 percentile bands</text>\n</g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string runtime_figure_svg(const std::vector<EvalReport>& reports) {
    constexpr double kW = 720.0;
    constexpr double kBarH = 22.0;
    constexpr double kLeft = 150.0;
    constexpr double kRight = 90.0;
    const double height = 60.0 + kBarH * 1.5 * static_cast<double>(reports.size());
    double tmax = 0.0;
    for (const auto& r : reports) tmax = std::max(tmax, r.build_seconds + r.query_seconds);
    if (!(tmax > 0.0)) tmax = 1.0;
    const double plot_w = kW - kLeft - kRight;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<!-- data: method,lut_size,components,build_seconds,query_seconds\n";
    for (const auto& r : reports)
        os << r.method << ',' << r.lut_size << ',' << r.components << ',' << fmt(r.build_seconds) << ','
           << fmt(r.query_seconds) << '\n';
    os << "-->\n";
    os << "<text x=\"" << kLeft << "\" y=\"18\" font-weight=\"bold\">CPU time: build/train (light) "
          "and query of the reference inputs (dark)</text>\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        const double y = 34.0 + static_cast<double>(i) * kBarH * 1.5;
        const double wb = r.build_seconds / tmax * plot_w;
        const double wq = r.query_seconds / tmax * plot_w;
        os << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed(y + kBarH * 0.7, 2)
           << "\" text-anchor=\"end\">" << label(r) << "</text>\n";
        os << "<rect x=\"" << kLeft << "\" y=\"" << y << "\" width=\"" << fixed(wb, 2) << "\" height=\""
           << kBarH << "\" fill=\"#9ecae1\"/>\n";
        os << "<rect x=\"" << fixed(kLeft + wb, 2) << "\" y=\"" << y << "\" width=\"" << fixed(wq, 2)
           << "\" height=\"" << kBarH << "\" fill=\"#08519c\"/>\n";
        os << "<text x=\"" << fixed(kLeft + wb + wq + 4, 2) << "\" y=\"" << fixed(y + kBarH * 0.7, 2)
           << "\">" << fixed(r.build_seconds + r.query_seconds, 3) << " s</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string strip_timing_columns(const std::string& csv) {
    std::istringstream is(csv);
    std::string line;
    if (!std::getline(is, line)) return {};
    const auto header = split(line, ',');
    std::vector<bool> keep(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto& h = header[i];
        keep[i] = !(h.size() >= 8 && h.compare(h.size() - 8, 8, "_seconds") == 0);
    }
    std::ostringstream os;
    auto emit = [&](const std::vector<std::string>& cells) {
        bool first = true;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i < keep.size() && !keep[i]) continue;
            os << (first ? "" : ",") << cells[i];
            first = false;
        }
        os << '\n';
    };
    emit(header);
    while (std::getline(is, line)) emit(split(line, ','));
    return os.str();
}

}  // namespace lutbench
