#include "app/output.hpp"

#include <charconv>
#include <cmath>

#include "u1lab/error.hpp"

#ifndef U1LAB_VERSION
#define U1LAB_VERSION "unknown"
#endif

namespace u1lab::app {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return {buf, res.ptr};
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw Error("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<Cell> cells) { row(std::vector<Cell>(cells)); }

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) throw ShapeError("CSV row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            out_ << format_double(v);
          } else {
            out_ << v;
          }
        },
        cells[i]);
  }
  out_ << '\n';
}

Run::Run(const Globals& g, std::string subcommand, nlohmann::json config)
    : globals_(g), subcommand_(std::move(subcommand)), config_(std::move(config)), start_(std::chrono::steady_clock::now()) {
  std::filesystem::create_directories(g.out_dir);
}

std::filesystem::path Run::file(const std::string& name) {
  outputs_.push_back(name);
  return globals_.out_dir / name;
}

CsvWriter Run::csv(const std::string& name, const std::vector<std::string>& header) { return {file(name), header}; }

void Run::warn(const std::string& message) { warnings_.push_back(message); }

void Run::record(const std::string& key, nlohmann::json value) { results_[key] = std::move(value); }

std::filesystem::path Run::finish() {
  nlohmann::json m;
  m["subcommand"] = subcommand_;
  m["config"] = config_;
  m["config"]["workers"] = globals_.workers;
  m["config"]["tau_units"] = globals_.tau_units == TauUnits::raw ? "raw" : "quarter-pi";
  m["seedless"] = globals_.seedless;
  m["rng_used"] = false;  // no subcommand draws random numbers
  m["version"] = U1LAB_VERSION;
  m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  m["outputs"] = outputs_;
  m["warnings"] = warnings_;
  m["results"] = results_;
  const auto path = globals_.out_dir / (subcommand_ + ".manifest.json");
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << m.dump(2) << '\n';
  return path;
}

nlohmann::json to_json(const GateParams& p) {
  return {{"delta", p.delta}, {"d", p.d}, {"b", p.b}, {"m", p.m}, {"tau", p.tau}, {"tau_over_quarter_pi", tau_to_quarter_pi(p.tau)}};
}

}  // namespace u1lab::app
