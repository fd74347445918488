#include "cpsarch/trace.hpp"

#include <sstream>
#include <stdexcept>

#include "detail/number_format.hpp"

namespace cpsarch {

void require_valid(const Trace& trace) {
  if (trace.timestamps.empty()) {
    throw std::invalid_argument("trace: needs at least one sample");
  }
  for (std::size_t i = 1; i < trace.timestamps.size(); ++i) {
    if (!(trace.timestamps[i] > trace.timestamps[i - 1])) {
      throw std::invalid_argument(
          "trace: timestamps must be strictly increasing");
    }
  }
  for (const auto& [name, series] : trace.signals) {
    if (series.size() != trace.timestamps.size()) {
      throw std::invalid_argument("trace: signal '" + name +
                                  "' length differs from timestamps");
    }
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& text, std::size_t line_no) {
  std::size_t consumed = 0;
  double value = 0;
  try {
    value = std::stod(text, &consumed);
  } catch (...) {
    throw ParseError("trace csv: bad number '" + text + "' on line " +
                     std::to_string(line_no));
  }
  while (consumed < text.size() &&
         (text[consumed] == ' ' || text[consumed] == '\r')) {
    ++consumed;
  }
  if (consumed != text.size()) {
    throw ParseError("trace csv: bad number '" + text + "' on line " +
                     std::to_string(line_no));
  }
  return value;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Trace read_trace_csv(std::string_view bytes) {
  std::istringstream in{std::string(bytes)};
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaError("trace csv: missing header row");
  }
  std::vector<std::string> header = split_csv_line(strip_cr(line));
  if (header.empty() || header.front() != "time") {
    throw SchemaError("trace csv: first header column must be 'time'");
  }
  if (header.size() < 2) {
    throw SchemaError("trace csv: needs at least one signal column");
  }

  Trace trace;
  std::vector<std::vector<double>*> columns;
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (header[i].empty()) {
      throw SchemaError("trace csv: empty signal name in header");
    }
    auto [it, inserted] = trace.signals.emplace(header[i],
                                                std::vector<double>{});
    if (!inserted) {
      throw SchemaError("trace csv: duplicate signal column '" + header[i] +
                        "'");
    }
    columns.push_back(&it->second);
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("trace csv: line " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()));
    }
    trace.timestamps.push_back(parse_number(fields[0], line_no));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      columns[i - 1]->push_back(parse_number(fields[i], line_no));
    }
  }

  if (trace.timestamps.empty()) {
    throw SchemaError("trace csv: needs at least one sample row");
  }
  try {
    require_valid(trace);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("trace csv: ") + e.what());
  }
  return trace;
}

std::string write_trace_csv(const Trace& trace) {
  require_valid(trace);
  std::ostringstream os;
  os << "time";
  for (const auto& [name, series] : trace.signals) os << ',' << name;
  os << '\n';
  for (std::size_t i = 0; i < trace.timestamps.size(); ++i) {
    os << detail::format_double(trace.timestamps[i]);
    for (const auto& [name, series] : trace.signals) {
      os << ',' << detail::format_double(series[i]);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace cpsarch
