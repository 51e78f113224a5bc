#include "dfp/ingest.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace dfp {
namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& s, int line, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw std::runtime_error("load_panel: line " + std::to_string(line) + ": unparsable " + what +
                             " '" + s + "'");
  return v;
}

int parse_int(const std::string& s, int line, const char* what) {
  const double v = parse_double(s, line, what);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw std::runtime_error("load_panel: line " + std::to_string(line) + ": " + what + " '" + s +
                             "' is not an integer");
  return i;
}

struct CellKey {
  std::string state;
  int gender;
  int year;
  bool operator<(const CellKey& o) const {
    return std::tie(state, gender, year) < std::tie(o.state, o.gender, o.year);
  }
};

struct CellData {
  std::vector<double> ages, dx, qx;
  std::map<double, int> seen_line;  // age -> first file line, for duplicate reports
};

// Linear interpolation with clamped extrapolation outside the source range.
VectorXd interp_curve(const VectorXd& x, const VectorXd& y, const VectorXd& xt) {
  VectorXd out(xt.size());
  for (Index i = 0; i < xt.size(); ++i) {
    double a = xt(i);
    if (a <= x(0)) {
      out(i) = y(0);
    } else if (a >= x(x.size() - 1)) {
      out(i) = y(y.size() - 1);
    } else {
      Index hi = 1;
      while (x(hi) < a) ++hi;
      const double t = (a - x(hi - 1)) / (x(hi) - x(hi - 1));
      out(i) = (1.0 - t) * y(hi - 1) + t * y(hi);
    }
  }
  return out;
}

}  // namespace

LoadedPanel load_panel(std::istream& in, const std::optional<AgeGrid>& target_grid, double radix) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_panel: empty input");
  const auto header = split_csv(line);
  auto col = [&](const char* name) {
    for (size_t i = 0; i < header.size(); ++i) {
      std::string h = header[i];
      std::transform(h.begin(), h.end(), h.begin(), ::tolower);
      if (h == name) return static_cast<int>(i);
    }
    return -1;
  };
  const int c_state = col("state"), c_gender = col("gender"), c_year = col("year"),
            c_age = col("age"), c_dx = col("dx"), c_qx = col("qx");
  for (auto [idx, name] : {std::pair{c_state, "state"}, {c_gender, "gender"}, {c_year, "year"},
                           {c_age, "age"}, {c_dx, "dx"}}) {
    if (idx < 0)
      throw std::runtime_error(std::string("load_panel: missing required column '") + name + "'");
  }
  const bool has_qx = c_qx >= 0;
  const size_t min_fields =
      static_cast<size_t>(std::max({c_state, c_gender, c_year, c_age, c_dx, c_qx})) + 1;

  std::map<CellKey, CellData> cells;
  std::set<std::string> state_set;
  std::set<int> year_set;

  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv(line);
    if (f.size() < min_fields)
      throw std::runtime_error("load_panel: line " + std::to_string(lineno) + ": expected " +
                               std::to_string(min_fields) + " fields, got " +
                               std::to_string(f.size()));
    CellKey key;
    key.state = f[c_state];
    if (key.state.empty())
      throw std::runtime_error("load_panel: line " + std::to_string(lineno) + ": empty state");
    const std::string& gs = f[c_gender];
    if (gs.size() != 1 || (gs[0] != 'F' && gs[0] != 'M' && gs[0] != 'f' && gs[0] != 'm'))
      throw std::runtime_error("load_panel: line " + std::to_string(lineno) +
                               ": gender must be F or M, got '" + gs + "'");
    key.gender = static_cast<int>(gender_from_code(gs[0]));
    key.year = parse_int(f[c_year], lineno, "year");
    const double age = parse_double(f[c_age], lineno, "age");
    const double dx = parse_double(f[c_dx], lineno, "dx");
    if (dx < 0)
      throw std::runtime_error("load_panel: line " + std::to_string(lineno) +
                               ": negative death count " + f[c_dx]);
    double qx = 0.0;
    if (has_qx) qx = parse_double(f[c_qx], lineno, "qx");

    CellData& cell = cells[key];
    auto [it, inserted] = cell.seen_line.emplace(age, lineno);
    if (!inserted)
      throw std::runtime_error("load_panel: line " + std::to_string(lineno) + ": duplicate row (" +
                               key.state + "," + gender_code(static_cast<Gender>(key.gender)) +
                               "," + std::to_string(key.year) + ",age " + f[c_age] +
                               "), first seen at line " + std::to_string(it->second));
    cell.ages.push_back(age);
    cell.dx.push_back(dx);
    cell.qx.push_back(qx);
    state_set.insert(key.state);
    year_set.insert(key.year);
  }
  if (cells.empty()) throw std::runtime_error("load_panel: no data rows");

  const std::vector<std::string> states(state_set.begin(), state_set.end());
  const std::vector<int> years(year_set.begin(), year_set.end());

  // Every state x gender x year cell must be present.
  std::vector<std::string> gaps;
  for (const auto& st : states)
    for (Gender g : kGenders)
      for (int y : years) {
        CellKey key{st, static_cast<int>(g), y};
        if (!cells.count(key))
          gaps.push_back("(" + st + "," + std::string(1, gender_code(g)) + "," +
                         std::to_string(y) + ")");
      }
  if (!gaps.empty()) {
    std::string msg = "load_panel: panel is not rectangular, missing " +
                      std::to_string(gaps.size()) + " cell(s):";
    for (size_t i = 0; i < gaps.size() && i < 12; ++i) msg += " " + gaps[i];
    if (gaps.size() > 12) msg += " ...";
    throw RectangularityError(msg);
  }

  // Sort each cell by age and check all cells share one age set.
  const CellData* ref = nullptr;
  std::vector<double> ref_ages;
  for (auto& [key, cell] : cells) {
    std::vector<size_t> order(cell.ages.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return cell.ages[a] < cell.ages[b]; });
    CellData sorted;
    for (size_t i : order) {
      sorted.ages.push_back(cell.ages[i]);
      sorted.dx.push_back(cell.dx[i]);
      sorted.qx.push_back(cell.qx[i]);
    }
    sorted.seen_line = cell.seen_line;
    cell = std::move(sorted);
    if (!ref) {
      ref = &cell;
      ref_ages = cell.ages;
    } else if (cell.ages != ref_ages) {
      throw RectangularityError("load_panel: cell (" + key.state + "," +
                                std::string(1, gender_code(static_cast<Gender>(key.gender))) +
                                "," + std::to_string(key.year) +
                                ") has a different age set than the first cell");
    }
  }
  if (ref_ages.size() < 2)
    throw std::runtime_error("load_panel: need at least two distinct ages per cell");

  const AgeGrid source_grid(Eigen::Map<const VectorXd>(ref_ages.data(), ref_ages.size()));
  const AgeGrid grid = target_grid ? *target_grid : source_grid;
  const bool resample = grid != source_grid;

  LoadedPanel out{DensityPanel(grid, states, years, radix), {}, has_qx};
  if (has_qx)
    out.qx.assign(2 * states.size(), MatrixXd::Zero(static_cast<Index>(years.size()), grid.size()));

  for (const auto& [key, cell] : cells) {
    const Index s = out.panel.state_index(key.state);
    const Index t = static_cast<Index>(
        std::lower_bound(years.begin(), years.end(), key.year) - years.begin());
    const Gender g = static_cast<Gender>(key.gender);
    Eigen::Map<const VectorXd> dx(cell.dx.data(), static_cast<Index>(cell.dx.size()));
    Eigen::Map<const VectorXd> qx(cell.qx.data(), static_cast<Index>(cell.qx.size()));
    VectorXd d = resample ? interp_curve(source_grid.ages(), dx, grid.ages()) : VectorXd(dx);
    const double mass = grid.integrate(d);
    if (!(mass > 0))
      throw std::runtime_error("load_panel: cell (" + key.state + "," +
                               std::string(1, gender_code(g)) + "," + std::to_string(key.year) +
                               ") has no positive mass");
    out.panel.block(s, g).row(t) = (d * (radix / mass)).transpose();
    if (has_qx)
      out.qx[2 * s + key.gender].row(t) =
          (resample ? interp_curve(source_grid.ages(), qx, grid.ages()) : VectorXd(qx))
              .transpose();
  }
  return out;
}

LoadedPanel load_panel_file(const std::string& path, const std::optional<AgeGrid>& target_grid,
                            double radix) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_panel: cannot open '" + path + "'");
  return load_panel(in, target_grid, radix);
}

DensityCurve repair_zero_counts(const DensityCurve& curve, const std::optional<VectorXd>& qx) {
  const Index p = curve.values.size();
  DensityCurve out = curve;
  if (qx) {
    if (qx->size() != p)
      throw std::invalid_argument("repair_zero_counts: qx length does not match the grid");
    for (Index i = 0; i < p; ++i)
      if (!((*qx)(i) > 0.0) || (*qx)(i) > 1.0)
        throw std::invalid_argument("repair_zero_counts: qx must lie in (0, 1]");
    double survivors = curve.radix;
    for (Index i = 0; i < p; ++i) {
      out.values(i) = survivors * (*qx)(i);
      survivors -= out.values(i);
    }
    return out;
  }
  const double eps = 1e-5 * curve.radix / static_cast<double>(p);
  for (Index i = 0; i < p; ++i)
    if (!(out.values(i) > 0.0)) out.values(i) = eps;
  const double mass = out.grid.integrate(out.values);
  out.values *= curve.radix / mass;
  return out;
}

DensityPanel repair_panel(const LoadedPanel& loaded) {
  DensityPanel out = loaded.panel;
  const double radix = out.radix();
  for (Index s = 0; s < out.n_states(); ++s)
    for (Gender g : kGenders) {
      MatrixXd& blk = out.block(s, g);
      for (Index t = 0; t < out.n_years(); ++t) {
        DensityCurve c{out.grid(), blk.row(t).transpose(), radix};
        std::optional<VectorXd> qx;
        if (loaded.has_qx)
          qx = loaded.qx[2 * s + static_cast<int>(g)].row(t).transpose();
        DensityCurve r = repair_zero_counts(c, qx);
        // Any zero left by the life-table recursion still needs the floor.
        if (!(r.values.minCoeff() > 0.0)) r = repair_zero_counts(r);
        blk.row(t) = (r.values * (radix / out.grid().integrate(r.values))).transpose();
      }
    }
  return out;
}

double gini_coefficient(const DensityCurve& curve) {
  const VectorXd& x = curve.grid.ages();
  const VectorXd s = curve.grid.weights().cwiseProduct(curve.values);
  const double mass = s.sum();
  if (!(mass > 0)) throw std::domain_error("gini_coefficient: curve has no positive mass");
  const double mean_age = s.dot(x) / mass;
  if (!(mean_age > 0)) throw std::domain_error("gini_coefficient: mean age must be positive");
  double acc = 0.0;
  for (Index i = 0; i < x.size(); ++i)
    for (Index j = i + 1; j < x.size(); ++j) acc += s(i) * s(j) * (x(j) - x(i));
  return 2.0 * acc / (2.0 * mean_age * mass * mass);
}

void write_gini_summary(std::ostream& out, const DensityPanel& panel) {
  out << "state,gender,year,gini\n";
  char buf[64];
  for (Index s = 0; s < panel.n_states(); ++s)
    for (Gender g : kGenders)
      for (Index t = 0; t < panel.n_years(); ++t) {
        std::snprintf(buf, sizeof buf, "%.12g", gini_coefficient(panel.curve(s, g, t)));
        out << panel.states()[s] << ',' << gender_code(g) << ',' << panel.years()[t] << ',' << buf
            << '\n';
      }
}

}  // namespace dfp
