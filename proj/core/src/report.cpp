#include "mvtlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#ifndef MVTLAB_VERSION
#define MVTLAB_VERSION "0.0.0"
#endif

namespace mvt {

namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string num(double v) { return fmt("%.10g", v); }
std::string px(double v) { return fmt("%.2f", v); }

const char* method_colour(Method m) {
  switch (m) {
    case Method::kEvolution:
      return "#d62728";
    case Method::kTaguchiPredict:
      return "#1f77b4";
    case Method::kTaguchiCandidate:
      return "#2ca02c";
    case Method::kTaguchi:
      return "#1f77b4";
  }
  return "#000000";
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::string traffic_label(double value) {
  const double exponent = std::round(std::log10(value));
  if (std::abs(value - std::pow(10.0, exponent)) < 1e-6 * value) {
    return "10^" + std::to_string(static_cast<int>(exponent));
  }
  return num(value);
}

}  // namespace

std::string tool_version() { return MVTLAB_VERSION; }

std::string render_csv(const ResultSeries& series) {
  std::ostringstream out;
  out << "traffic,method,mean,lo,hi\n";
  for (std::size_t t = 0; t < series.traffic.size(); ++t) {
    for (std::size_t m = 0; m < series.methods.size(); ++m) {
      const Interval& v = series.values[t][m];
      out << series.traffic[t] << ',' << to_string(series.methods[m]) << ',' << num(v.mean) << ',' << num(v.low)
          << ',' << num(v.high) << '\n';
    }
  }
  return out.str();
}

void emit_csv(const ResultSeries& series, const std::string& path) { write_text_file(path, render_csv(series)); }

std::string render_svg(const ResultSeries& series) {
  if (series.traffic.empty() || series.methods.empty() || series.values.empty()) {
    throw std::invalid_argument("cannot plot an empty series");
  }
  constexpr double kWidth = 760, kHeight = 480;
  constexpr double kLeft = 80, kRight = 30, kTop = 50, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double x_min = std::log10(static_cast<double>(series.traffic.front()));
  double x_max = std::log10(static_cast<double>(series.traffic.back()));
  if (x_max - x_min < 1e-9) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  double y_min = series.values[0][0].low, y_max = series.values[0][0].high;
  for (const auto& row : series.values) {
    for (const auto& v : row) {
      y_min = std::min(y_min, v.low);
      y_max = std::max(y_max, v.high);
    }
  }
  const double pad = std::max(1e-4, 0.05 * (y_max - y_min));
  y_min -= pad;
  y_max += pad;

  auto sx = [&](Count traffic) {
    return kLeft + (std::log10(static_cast<double>(traffic)) - x_min) / (x_max - x_min) * plot_w;
  };
  auto sy = [&](double y) { return kTop + (y_max - y) / (y_max - y_min) * plot_h; };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  out << "  <text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(series.title)
      << "</text>\n";

  // Axes and grid.
  out << "  <g stroke=\"#cccccc\" stroke-width=\"1\">\n";
  for (int decade = static_cast<int>(std::ceil(x_min - 1e-9)); decade <= static_cast<int>(std::floor(x_max + 1e-9));
       ++decade) {
    const double x = kLeft + (decade - x_min) / (x_max - x_min) * plot_w;
    out << "    <line x1=\"" << px(x) << "\" y1=\"" << kTop << "\" x2=\"" << px(x) << "\" y2=\"" << kTop + plot_h
        << "\"/>\n";
  }
  constexpr int kYTicks = 5;
  for (int i = 0; i <= kYTicks; ++i) {
    const double y = kTop + plot_h * i / kYTicks;
    out << "    <line x1=\"" << kLeft << "\" y1=\"" << px(y) << "\" x2=\"" << kLeft + plot_w << "\" y2=\"" << px(y)
        << "\"/>\n";
  }
  out << "  </g>\n";
  out << "  <rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int decade = static_cast<int>(std::ceil(x_min - 1e-9)); decade <= static_cast<int>(std::floor(x_max + 1e-9));
       ++decade) {
    const double x = kLeft + (decade - x_min) / (x_max - x_min) * plot_w;
    out << "  <text x=\"" << px(x) << "\" y=\"" << kTop + plot_h + 18 << "\" text-anchor=\"middle\">"
        << traffic_label(std::pow(10.0, decade)) << "</text>\n";
  }
  for (int i = 0; i <= kYTicks; ++i) {
    const double value = y_max - (y_max - y_min) * i / kYTicks;
    out << "  <text x=\"" << kLeft - 8 << "\" y=\"" << px(kTop + plot_h * i / kYTicks + 4)
        << "\" text-anchor=\"end\">" << fmt("%.4f", value) << "</text>\n";
  }
  out << "  <text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\">total traffic (impressions, log scale)</text>\n";
  out << "  <text x=\"18\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << kTop + plot_h / 2 << ")\">" << xml_escape(series.y_label) << "</text>\n";

  for (std::size_t m = 0; m < series.methods.size(); ++m) {
    const char* colour = method_colour(series.methods[m]);
    out << "  <polygon class=\"band\" fill=\"" << colour << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
    for (std::size_t t = 0; t < series.traffic.size(); ++t) {
      out << (t ? " " : "") << px(sx(series.traffic[t])) << ',' << px(sy(series.values[t][m].high));
    }
    for (std::size_t t = series.traffic.size(); t-- > 0;) {
      out << ' ' << px(sx(series.traffic[t])) << ',' << px(sy(series.values[t][m].low));
    }
    out << "\"/>\n";
    out << "  <polyline class=\"mean\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
    for (std::size_t t = 0; t < series.traffic.size(); ++t) {
      out << (t ? " " : "") << px(sx(series.traffic[t])) << ',' << px(sy(series.values[t][m].mean));
    }
    out << "\"/>\n";
  }

  out << "  <g class=\"legend\">\n";
  for (std::size_t m = 0; m < series.methods.size(); ++m) {
    const double y = kTop + 16 + 18.0 * static_cast<double>(m);
    out << "    <g class=\"legend-entry\"><line x1=\"" << kLeft + 12 << "\" y1=\"" << px(y) << "\" x2=\""
        << kLeft + 36 << "\" y2=\"" << px(y) << "\" stroke=\"" << method_colour(series.methods[m])
        << "\" stroke-width=\"2\"/><text x=\"" << kLeft + 42 << "\" y=\"" << px(y + 4) << "\">"
        << to_string(series.methods[m]) << "</text></g>\n";
  }
  out << "  </g>\n";
  out << "</svg>\n";
  return out.str();
}

void emit_svg(const ResultSeries& series, const std::string& path) { write_text_file(path, render_svg(series)); }

std::string render_generation_csv(const EvolutionResult& run, const Evaluator& evaluator) {
  std::ostringstream out;
  out << "generation,slot,lineage,genome,impressions,conversions,true_cr\n";
  const double control_cr = evaluator.true_cr(control(evaluator.space()));
  const std::string control_genome = control(evaluator.space()).to_string();
  for (const auto& record : run.generations) {
    for (std::size_t i = 0; i < record.population.size(); ++i) {
      const auto& ind = record.population[i];
      out << record.generation + 1 << ',' << i << ',' << ind.lineage << ',' << ind.genome.to_string() << ','
          << ind.stats.impressions << ',' << ind.stats.conversions << ',' << num(evaluator.true_cr(ind.genome))
          << '\n';
    }
    out << record.generation + 1 << ",control,," << control_genome << ',' << record.control.impressions << ','
        << record.control.conversions << ',' << num(control_cr) << '\n';
  }
  return out.str();
}

std::string render_manifest(const ExperimentConfig& config, const std::vector<std::string>& outputs) {
  nlohmann::ordered_json j;
  j["tool"] = "mvtlab";
  j["version"] = tool_version();
  j["compiler"] = __VERSION__;
  j["experiment"] = config.name;
  j["kind"] = std::string(to_string(config.kind));
  j["seed"] = config.seed;
  j["repetitions"] = config.repetitions;
  j["fixed_evaluator"] = config.fixed_evaluator;
  j["config_hash"] = config.hash();
  j["config"] = config.to_text();
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace mvt
