#include "zdiheat/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "zdiheat/error.hpp"
#include "zdiheat/gevrey.hpp"

namespace zdiheat {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void config_error(std::string_view key, const std::string& what) {
  fail(ErrorKind::kConfig, "field '" + std::string(key) + "': " + what);
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    config_error(key, "expected a number, got '" + std::string(text) + "'");
  }
  if (!std::isfinite(v)) config_error(key, "value must be finite");
  return v;
}

std::size_t parse_count(std::string_view key, std::string_view text) {
  text = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    config_error(key, "expected a nonnegative integer, got '" + std::string(text) + "'");
  }
  return v;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string_view::npos ? text.size() - start : comma - start);
    out.push_back(parse_double(key, item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Shortest text that parses back to the same double.
std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

template <class F>
auto checked(std::string_view field, F&& make) {
  try {
    return make();
  } catch (const Error& e) {
    throw Error(e.kind(), "field '" + std::string(field) + "': " + e.what(), e.order());
  }
}

}  // namespace

void set_config_value(ExperimentConfig& c, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "bc.k0") {
    c.k0 = parse_double(key, value);
  } else if (key == "bc.k1") {
    c.k1 = parse_double(key, value);
  } else if (key == "layout.uniform") {
    c.uniform_m = parse_count(key, value);
    c.points.clear();
  } else if (key == "layout.points") {
    c.points = parse_list(key, value);
    if (c.points.empty()) config_error(key, "needs at least one point");
  } else if (key == "gevrey.sigma") {
    c.sigma = parse_double(key, value);
  } else if (key == "gevrey.T") {
    c.duration = parse_double(key, value);
  } else if (key == "gevrey.form") {
    if (value == "standard") {
      c.form = BumpForm::kStandard;
    } else if (value == "printed") {
      c.form = BumpForm::kPrinted;
    } else {
      config_error(key, "expected 'standard' or 'printed'");
    }
  } else if (key == "grid.nx") {
    c.nx = parse_count(key, value);
  } else if (key == "grid.nt") {
    c.nt = parse_count(key, value);
  } else if (key == "grid.t_end") {
    c.t_end = parse_double(key, value);
  } else if (key == "grid.substeps") {
    c.substeps = parse_count(key, value);
  } else if (key == "initial") {
    if (value == "cosine") {
      c.initial = InitialKind::kCosine;
    } else if (value == "zero") {
      c.initial = InitialKind::kZero;
    } else if (value == "table") {
      c.initial = InitialKind::kTable;
    } else {
      config_error(key, "expected 'cosine', 'zero' or 'table'");
    }
  } else if (key == "initial.values") {
    c.initial_values = parse_list(key, value);
  } else if (key == "target") {
    if (value == "sine") {
      c.target = TargetKind::kSine;
    } else if (value == "values") {
      c.target = TargetKind::kValues;
    } else {
      config_error(key, "expected 'sine' or 'values'");
    }
  } else if (key == "target.amplitude") {
    c.target_amplitude = parse_double(key, value);
  } else if (key == "target.values") {
    c.target_values = parse_list(key, value);
  } else if (key == "series.tolerance") {
    c.tolerance = parse_double(key, value);
  } else if (key == "series.max_order") {
    c.max_order = parse_count(key, value);
  } else if (key == "reference.gamma") {
    if (value == "derived") {
      c.gamma = GammaForm::kDerived;
    } else if (value == "printed") {
      c.gamma = GammaForm::kPrinted;
    } else {
      config_error(key, "expected 'derived' or 'printed'");
    }
  } else if (key == "output.dir") {
    if (value.empty()) config_error(key, "must not be empty");
    c.output_dir = std::string(value);
  } else {
    fail(ErrorKind::kConfig, "unknown field '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config(std::string_view text, std::string_view origin) {
  ExperimentConfig config;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = std::string(origin) + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::kConfig, where + "expected 'key = value', got '" + std::string(line) + "'");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) fail(ErrorKind::kConfig, where + "missing field name");
    if (!seen.insert(std::string(key)).second) {
      fail(ErrorKind::kConfig, where + "field '" + std::string(key) + "' given twice");
    }
    try {
      set_config_value(config, key, line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.kind(), where + e.what());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "bc.k0 = " << format_double(c.k0) << "\n";
  out << "bc.k1 = " << format_double(c.k1) << "\n";
  if (c.points.empty()) {
    out << "layout.uniform = " << c.uniform_m << "\n";
  } else {
    out << "layout.points = " << format_list(c.points) << "\n";
  }
  out << "gevrey.sigma = " << format_double(c.sigma) << "\n";
  out << "gevrey.T = " << format_double(c.duration) << "\n";
  out << "gevrey.form = " << to_string(c.form) << "\n";
  out << "grid.nx = " << c.nx << "\n";
  out << "grid.nt = " << c.nt << "\n";
  out << "grid.t_end = " << format_double(c.t_end) << "\n";
  out << "grid.substeps = " << c.substeps << "\n";
  switch (c.initial) {
    case InitialKind::kCosine: out << "initial = cosine\n"; break;
    case InitialKind::kZero: out << "initial = zero\n"; break;
    case InitialKind::kTable: out << "initial = table\n"; break;
  }
  if (!c.initial_values.empty()) out << "initial.values = " << format_list(c.initial_values) << "\n";
  out << "target = " << (c.target == TargetKind::kSine ? "sine" : "values") << "\n";
  out << "target.amplitude = " << format_double(c.target_amplitude) << "\n";
  if (!c.target_values.empty()) out << "target.values = " << format_list(c.target_values) << "\n";
  out << "series.tolerance = " << format_double(c.tolerance) << "\n";
  out << "series.max_order = " << c.max_order << "\n";
  out << "reference.gamma = " << (c.gamma == GammaForm::kDerived ? "derived" : "printed") << "\n";
  out << "output.dir = " << c.output_dir << "\n";
  return out.str();
}

ValidatedConfig validate_config(const ExperimentConfig& c) {
  BoundaryParams bc = checked("bc.k0/bc.k1", [&] { return BoundaryParams(c.k0, c.k1); });
  ActuatorLayout layout = checked(c.points.empty() ? "layout.uniform" : "layout.points", [&] {
    return c.points.empty() ? ActuatorLayout::uniform(c.uniform_m) : ActuatorLayout(c.points);
  });
  GevreySpec spec = checked("gevrey.sigma", [&] { return GevreySpec(c.sigma, c.duration, c.form); });
  SpaceTimeGrid grid = checked("grid", [&] { return SpaceTimeGrid(c.nx, c.nt, c.t_end); });
  if (c.substeps < 1) config_error("grid.substeps", "must be at least 1");
  if (!(c.tolerance > 0.0)) config_error("series.tolerance", "must be positive");
  if (c.max_order < 1 || c.max_order + 1 > kMaxJetOrder) {
    config_error("series.max_order", "must lie in [1, " + std::to_string(kMaxJetOrder - 1) + "]");
  }
  if (c.initial == InitialKind::kTable && c.initial_values.size() < 2) {
    config_error("initial.values", "a tabulated initial condition needs at least two samples");
  }
  std::vector<double> target(layout.size());
  if (c.target == TargetKind::kSine) {
    for (std::size_t j = 0; j < layout.size(); ++j) {
      target[j] = c.target_amplitude * std::sin(std::numbers::pi * layout[j]);
    }
  } else {
    if (c.target_values.size() != layout.size()) {
      config_error("target.values", "needs " + std::to_string(layout.size()) + " values, got " +
                                        std::to_string(c.target_values.size()));
    }
    target = c.target_values;
  }
  return ValidatedConfig{bc, std::move(layout), spec, grid, std::move(target)};
}

InitialFn initial_profile(const ExperimentConfig& c) {
  switch (c.initial) {
    case InitialKind::kCosine:
      return [](double x) { return std::cos(std::numbers::pi * x); };
    case InitialKind::kZero:
      return [](double) { return 0.0; };
    case InitialKind::kTable:
      break;
  }
  const std::vector<double> table = c.initial_values;
  return [table](double x) {
    const double pos = std::clamp(x, 0.0, 1.0) * static_cast<double>(table.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(pos), table.size() - 2);
    const double s = pos - static_cast<double>(i);
    return table[i] + s * (table[i + 1] - table[i]);
  };
}

}  // namespace zdiheat
