#include "paramsens/report.hpp"

#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace paramsens {

namespace {

std::ofstream open(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string value_or_empty(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

}  // namespace

void write_report(const Analysis& a, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto m = study_matrix(a);
  const auto& f = a.field;

  {
    auto out = open(out_dir / "matrix.csv");
    out << "parameter";
    for (const auto& c : m.columns) out << ',' << c;
    out << '\n';
    for (const auto r : m.row_order) {
      out << m.parameters[r];
      for (Eigen::Index c = 0; c < m.normalized.cols(); ++c) {
        out << ',' << format_real(m.normalized(static_cast<Eigen::Index>(r), c));
      }
      out << '\n';
    }
  }
  {
    auto out = open(out_dir / "globals.csv");
    out << "parameter,measure,global\n";
    for (std::size_t p = 0; p < f.parameters.size(); ++p) {
      for (std::size_t k = 0; k < f.measures.size(); ++k) {
        out << f.parameters[p] << ',' << f.measures[k] << ',' << value_or_empty(f.global[k][p]) << '\n';
      }
    }
  }
  {
    auto out = open(out_dir / "regional.csv");
    out << "parameter,measure,bin_center,value,count\n";
    for (std::size_t p = 0; p < f.parameters.size(); ++p) {
      for (std::size_t k = 0; k < f.measures.size(); ++k) {
        for (const auto& b : f.regional[k][p]) {
          out << f.parameters[p] << ',' << f.measures[k] << ',' << format_real(b.center) << ','
              << value_or_empty(b.value) << ',' << b.count << '\n';
        }
      }
    }
  }
  {
    auto out = open(out_dir / "mds.csv");
    out << "sample_id,x,y\n";
    for (std::size_t i = 0; i < a.ok_ids.size(); ++i) {
      out << a.ok_ids[i] << ',' << format_real(a.embedding.coordinates[i][0]) << ','
          << format_real(a.embedding.coordinates[i][1]) << '\n';
    }
  }

  auto out = open(out_dir / "summary.txt");
  out << "study: " << a.config.name << '\n';
  out << "samples: " << a.plan.samples.size() << " (" << a.ok_ids.size() << " usable, " << a.plan.star_count
      << " stars, step " << a.plan.step << ")\n";
  out << "matrix measure: " << measure_name(a.config.matrix_measure) << "\n\n";
  out << "in-out matrix (column-normalized, rows by influence on StraightLength)\n";
  out << std::left << std::setw(16) << "";
  for (const auto& c : m.columns) out << std::setw(18) << c;
  out << '\n' << std::fixed << std::setprecision(3);
  for (const auto r : m.row_order) {
    out << std::setw(16) << m.parameters[r];
    for (Eigen::Index c = 0; c < m.normalized.cols(); ++c) {
      out << std::setw(18) << m.normalized(static_cast<Eigen::Index>(r), c);
    }
    out << '\n';
  }
  out << "\nMDS stress: " << std::setprecision(4) << a.embedding.stress << '\n';
  const auto& occ = a.occupation.values;
  double peak = 0.0;
  for (const double v : occ) peak = std::max(peak, v);
  out << "occupation ratio maximum: " << peak << '\n';
}

}  // namespace paramsens
