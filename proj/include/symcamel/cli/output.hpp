#pragma once

// Trace serialization.
//
// CSV columns, in this order (restricted by output.fields):
//   t, z_0 .. z_{2n-1}, purity, entropy_kB, capacity, lambda_1 .. lambda_{n_A},
//   volume_ratio, symplecticity_defect
// Numbers use 17 significant digits, '.' as decimal separator.
// A divergence ends the file with the comment line
//   # status=diverged,t=<time>
//
// JSONL: one object per knot, {"schema_version":1,"record":"trace",...},
// and on divergence a final {"schema_version":1,"record":"status",...}.

#include <algorithm>
#include <array>
#include <charconv>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "symcamel/cli/config.hpp"
#include "symcamel/gaussian.hpp"

namespace symcamel::cli {

inline constexpr int schema_version = 1;

inline std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                       std::chars_format::general, 17);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

struct TraceRow {
  double t = 0.0;
  PhasePoint z;
  double purity = 1.0;
  double entropy_kB = 0.0;
  double capacity = 0.0;
  std::vector<double> lambda;
  double volume_ratio = 1.0;
  double defect = 0.0;
};

/// Row for knot k of a trace; capacity uses ball radius R.
inline TraceRow make_row(const SubsystemTrace& tr, std::size_t k, double radius) {
  return TraceRow{tr.times[k],
                  tr.points[k],
                  tr.purity[k],
                  tr.entropy_kB[k],
                  tr.capacity[k] * radius * radius / tr.hbar,
                  tr.spectra[k].values,
                  tr.volume_ratio[k],
                  tr.defect[k]};
}

class TraceWriter {
 public:
  TraceWriter(std::ostream& out, OutputFormat format, std::vector<std::string> fields,
              const Dimensions& dims)
      : out_(out), format_(format), dims_(dims) {
    fields_ = fields.empty() ? output_field_names() : std::move(fields);
  }

  bool has(const std::string& f) const {
    return std::find(fields_.begin(), fields_.end(), f) != fields_.end();
  }

  std::vector<std::string> columns() const {
    std::vector<std::string> cols;
    for (const auto& f : fields_) {
      if (f == "z")
        for (int i = 0; i < dims_.phase_dim(); ++i) cols.push_back("z_" + std::to_string(i));
      else if (f == "lambda")
        for (int j = 1; j <= dims_.n_a(); ++j) cols.push_back("lambda_" + std::to_string(j));
      else
        cols.push_back(f);
    }
    return cols;
  }

  void header() {
    if (format_ != OutputFormat::CSV) return;
    const auto cols = columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
    out_ << '\n';
  }

  void row(const TraceRow& r) {
    if (format_ == OutputFormat::CSV)
      write_csv(r);
    else
      write_jsonl(r);
  }

  void diverged(double t, const std::string& message) {
    if (format_ == OutputFormat::CSV) {
      out_ << "# status=diverged,t=" << format_number(t) << '\n';
    } else {
      nlohmann::ordered_json j;
      j["schema_version"] = schema_version;
      j["record"] = "status";
      j["status"] = "diverged";
      j["t"] = t;
      j["message"] = message;
      out_ << j.dump() << '\n';
    }
    out_.flush();
  }

 private:
  void write_csv(const TraceRow& r) {
    bool first = true;
    auto put = [&](double v) {
      out_ << (first ? "" : ",") << format_number(v);
      first = false;
    };
    for (const auto& f : fields_) {
      if (f == "t") put(r.t);
      if (f == "z")
        for (Eigen::Index i = 0; i < r.z.size(); ++i) put(r.z(i));
      if (f == "purity") put(r.purity);
      if (f == "entropy_kB") put(r.entropy_kB);
      if (f == "capacity") put(r.capacity);
      if (f == "lambda")
        for (double v : r.lambda) put(v);
      if (f == "volume_ratio") put(r.volume_ratio);
      if (f == "symplecticity_defect") put(r.defect);
    }
    out_ << '\n';
  }

  void write_jsonl(const TraceRow& r) {
    nlohmann::ordered_json j;
    j["schema_version"] = schema_version;
    j["record"] = "trace";
    for (const auto& f : fields_) {
      if (f == "t") j["t"] = r.t;
      if (f == "z") j["z"] = std::vector<double>(r.z.data(), r.z.data() + r.z.size());
      if (f == "purity") j["purity"] = r.purity;
      if (f == "entropy_kB") j["entropy_kB"] = r.entropy_kB;
      if (f == "capacity") j["capacity"] = r.capacity;
      if (f == "lambda") j["lambda"] = r.lambda;
      if (f == "volume_ratio") j["volume_ratio"] = r.volume_ratio;
      if (f == "symplecticity_defect") j["symplecticity_defect"] = r.defect;
    }
    out_ << j.dump() << '\n';
  }

  std::ostream& out_;
  OutputFormat format_;
  std::vector<std::string> fields_;
  Dimensions dims_;
};

}  // namespace symcamel::cli
