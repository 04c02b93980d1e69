#include <istream>
#include <string>

#include "common/text.hpp"
#include "distwatch/errors.hpp"
#include "distwatch/eval.hpp"

namespace distwatch {

namespace {

std::string token(std::string s) {
  for (char& c : s) {
    if (c == ' ' || c == '\t' || c == '=') c = '_';
  }
  return s.empty() ? std::string("-") : s;
}

}  // namespace

BenchmarkTable benchmark_table(const std::string& model, std::span<const ClassMetrics> metrics,
                               const ClassRegistry& registry, int size_pixels) {
  BenchmarkTable table{model, size_pixels, {}};
  auto take = [&](const std::string& name) {
    for (const ClassMetrics& m : metrics) {
      if (m.class_name == name) {
        table.rows.push_back(m);
        return;
      }
    }
  };
  take("All");
  for (const std::string& name : registry.class_names) take(name);
  return table;
}

std::string format_benchmark_text(const BenchmarkTable& table) {
  std::string out = "Model | Size (pixels) | Class | Precision | Recall | mAPval 0.5:0.95 | mAPval 0.5\n";
  const std::string prefix = token(table.model) + " " + std::to_string(table.size_pixels) + " ";
  for (const ClassMetrics& m : table.rows) {
    out += prefix + token(m.class_name) + " " + text::fixed(m.precision, 1) + " " + text::fixed(m.recall, 1) + " " +
           text::fixed(m.map_50_95, 1) + " " + text::fixed(m.map_50, 1) + "\n";
  }
  return out;
}

std::string format_benchmark_sidecar(const BenchmarkTable& table) {
  std::string out = "table model=" + token(table.model) + " size=" + std::to_string(table.size_pixels) + "\n";
  for (const ClassMetrics& m : table.rows) {
    out += "row class=" + token(m.class_name) + " precision=" + text::shortest(m.precision) +
           " recall=" + text::shortest(m.recall) + " map_50_95=" + text::shortest(m.map_50_95) +
           " map_50=" + text::shortest(m.map_50) + "\n";
  }
  return out;
}

BenchmarkTable parse_benchmark_sidecar(std::istream& in, const std::filesystem::path& origin) {
  BenchmarkTable table;
  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = text::split_ws(line);
    if (fields.empty() || fields[0].front() == '#') continue;

    auto value_of = [&](std::string_view key) -> std::string_view {
      for (std::size_t k = 1; k < fields.size(); ++k) {
        const auto eq = fields[k].find('=');
        if (eq != std::string_view::npos && fields[k].substr(0, eq) == key) return fields[k].substr(eq + 1);
      }
      throw ParseError(origin, line_no, "missing key '" + std::string(key) + "'");
    };
    auto number_of = [&](std::string_view key) {
      const auto v = text::parse_number<double>(value_of(key));
      if (!v) throw ParseError(origin, line_no, "value for '" + std::string(key) + "' is not a number");
      return *v;
    };

    if (fields[0] == "table") {
      table.model = std::string(value_of("model"));
      const auto size = text::parse_number<int>(value_of("size"));
      if (!size) throw ParseError(origin, line_no, "size is not an integer");
      table.size_pixels = *size;
      have_header = true;
    } else if (fields[0] == "row") {
      if (!have_header) throw ParseError(origin, line_no, "row before table header");
      ClassMetrics m;
      m.class_name = std::string(value_of("class"));
      m.precision = number_of("precision");
      m.recall = number_of("recall");
      m.map_50_95 = number_of("map_50_95");
      m.map_50 = number_of("map_50");
      for (double v : {m.precision, m.recall, m.map_50_95, m.map_50}) {
        if (!(v >= 0.0 && v <= 100.0)) throw ParseError(origin, line_no, "metric outside [0,100]");
      }
      table.rows.push_back(std::move(m));
    } else {
      throw ParseError(origin, line_no, "expected 'table' or 'row' record");
    }
  }
  if (!have_header) throw ParseError(origin, line_no, "missing table header");
  return table;
}

}  // namespace distwatch
