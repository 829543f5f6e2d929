#include "perron/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "perron/errors.hpp"

namespace perron {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(shorter, "%lf", &back);
    if (back == v) return shorter;
  }
  return buf;
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const Eigen::MatrixXd& data) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c)
      out << (c ? "," : "") << format_double(data(r, c));
    out << "\n";
  }
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char ch;
  while (in.get(ch)) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void export_grid_csv(const Grid& grid, const std::filesystem::path& path) {
  Eigen::MatrixXd data(grid.size(), grid.dim() + 1);
  data.leftCols(grid.dim()) = grid.points;
  data.col(grid.dim()) = grid.weights;
  std::vector<std::string> header;
  for (Eigen::Index d = 0; d < grid.dim(); ++d)
    header.push_back("x" + std::to_string(d + 1));
  header.push_back("weight");
  write_csv(path, header, data);
}

void export_operator(const DiscreteOperator& op,
                     const std::filesystem::path& matrix_csv,
                     const std::filesystem::path& meta_json) {
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < op.matrix.cols(); ++j)
    header.push_back("c" + std::to_string(j));
  write_csv(matrix_csv, header, op.matrix);

  nlohmann::json meta;
  meta["label"] = op.label;
  meta["n"] = op.matrix.rows();
  meta["dim"] = op.grid.dim();
  meta["clamp_warnings"] = op.clamp_warnings;
  meta["points"] = std::vector<std::vector<double>>();
  for (Eigen::Index i = 0; i < op.grid.size(); ++i) {
    std::vector<double> row(op.grid.dim());
    for (Eigen::Index d = 0; d < op.grid.dim(); ++d)
      row[d] = op.grid.points(i, d);
    meta["points"].push_back(row);
  }
  meta["weights"] =
      std::vector<double>(op.grid.weights.data(),
                          op.grid.weights.data() + op.grid.weights.size());
  meta["axes"] = std::vector<std::vector<double>>();
  for (const auto& ax : op.grid.axes)
    meta["axes"].push_back(std::vector<double>(ax.data(), ax.data() + ax.size()));
  std::ofstream out(meta_json);
  if (!out) throw Error("cannot open " + meta_json.string());
  out << meta.dump(2) << "\n";
}

DiscreteOperator import_operator(const std::filesystem::path& matrix_csv,
                                 const std::filesystem::path& meta_json) {
  std::ifstream min(meta_json);
  if (!min) throw Error("cannot open " + meta_json.string());
  nlohmann::json meta = nlohmann::json::parse(min);
  DiscreteOperator op;
  op.label = meta.value("label", "imported");
  op.clamp_warnings = meta.value("clamp_warnings", 0LL);
  const auto pts = meta.at("points").get<std::vector<std::vector<double>>>();
  const auto wts = meta.at("weights").get<std::vector<double>>();
  const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
  const Eigen::Index d = n ? static_cast<Eigen::Index>(pts[0].size()) : 0;
  op.grid.points.resize(n, d);
  op.grid.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) op.grid.points(i, k) = pts[i][k];
    op.grid.weights(i) = wts[i];
  }
  for (const auto& ax : meta.value("axes", std::vector<std::vector<double>>())) {
    Eigen::VectorXd v(ax.size());
    for (std::size_t i = 0; i < ax.size(); ++i) v(i) = ax[i];
    op.grid.axes.push_back(v);
  }

  std::ifstream in(matrix_csv);
  if (!in) throw Error("cannot open " + matrix_csv.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  op.matrix.resize(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      op.matrix(i, j) = rows[i][j];
  if (op.matrix.rows() != n || op.matrix.cols() != n)
    throw Error("matrix/grid size mismatch in imported operator");
  return op;
}

}  // namespace perron
