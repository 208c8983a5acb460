#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kolmofix/error.hpp"
#include "kolmofix/io.hpp"

namespace kolmofix {
namespace {

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "': file not found or unreadable");
  return in;
}

}  // namespace

void write_measure_csv(const std::string& path, const DiscreteMeasure& mu) {
  std::ofstream out = open_out(path);
  for (int i = 0; i < mu.dim(); ++i) out << 'x' << i + 1 << ',';
  out << "weight\n";
  for (std::size_t k = 0; k < mu.size(); ++k) {
    for (int i = 0; i < mu.dim(); ++i) out << exact(mu.coord(k, i)) << ',';
    out << exact(mu.weight(k)) << '\n';
  }
}

DiscreteMeasure read_measure_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw MeasureError(path + ": empty file");
  int dim = 0;
  {
    std::stringstream ss(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() < 2 || cols.back() != "weight") throw MeasureError(path + ": header must be x1,...,xd,weight");
    dim = static_cast<int>(cols.size()) - 1;
    for (int i = 0; i < dim; ++i) {
      if (cols[static_cast<std::size_t>(i)] != "x" + std::to_string(i + 1)) {
        throw MeasureError(path + ": header must be x1,...,xd,weight");
      }
    }
  }
  std::vector<double> coords;
  std::vector<double> weights;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError("not a number: '" + cell + "'", row, 1);
      }
    }
    if (static_cast<int>(vals.size()) != dim + 1) throw ParseError("expected " + std::to_string(dim + 1) + " columns", row, 1);
    coords.insert(coords.end(), vals.begin(), vals.end() - 1);
    weights.push_back(vals.back());
  }
  return DiscreteMeasure(dim, std::move(coords), std::move(weights));
}

void write_grid_json(const std::string& path, const GridDensity& g) {
  nlohmann::json j;
  j["axes"] = nlohmann::json::array();
  for (const Axis& a : g.axes()) j["axes"].push_back({{"lower", a.lower}, {"upper", a.upper}, {"cells", a.cells}});
  j["values"] = g.values();
  std::ofstream out = open_out(path);
  out << j.dump() << '\n';
}

GridDensity read_grid_json(const std::string& path) {
  std::ifstream in = open_in(path);
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    std::vector<Axis> axes;
    for (const auto& a : j.at("axes")) axes.push_back({a.at("lower").get<double>(), a.at("upper").get<double>(), a.at("cells").get<int>()});
    return GridDensity(std::move(axes), j.at("values").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw MeasureError(path + ": " + e.what());
  }
}

}  // namespace kolmofix
