#include "evidence/bench/bench.hpp"
#include "evidence/numkit/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace evidence::bench {

namespace {

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

constexpr const char* kGap = "NA";

template <class T>
void push_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

struct Grid {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string render_markdown(const Grid& g, const std::string& title) {
  std::ostringstream out;
  out << "### " << title << "\n\n|";
  for (const auto& h : g.header) out << ' ' << h << " |";
  out << "\n|";
  for (std::size_t i = 0; i < g.header.size(); ++i) out << (i == 0 ? " --- |" : " ---: |");
  out << '\n';
  for (const auto& r : g.rows) {
    out << '|';
    for (const auto& c : r) out << ' ' << c << " |";
    out << '\n';
  }
  return out.str();
}

std::string render_csv(const Grid& g) {
  std::ostringstream out;
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const bool quote = cells[i].find_first_of(",\"") != std::string::npos;
      if (i) out << ',';
      if (quote) {
        out << '"';
        for (char ch : cells[i]) out << (ch == '"' ? "\"\"" : std::string(1, ch));
        out << '"';
      } else {
        out << cells[i];
      }
    }
    out << '\n';
  };
  line(g.header);
  for (const auto& r : g.rows) line(r);
  return out.str();
}

// Cells each layout always has.
std::vector<std::string> required_columns(const std::string& layout) {
  if (layout == "table1") return {"Exact", "INLA", "H.mean"};
  if (layout == "table2" || layout == "table3") return {"INLA", "Chib"};
  if (layout == "glmm") return {"INLA"};
  return {};
}

std::vector<std::string> required_rows(const std::string& layout) {
  if (layout == "table4") {
    return {"Laplace", "Laplace MAP", "INLA", "Chib-Jeliazkov", "Harmonic mean", "Power posteriors", "AIS",
            "Nested sampling"};
  }
  return {};
}

TableOutput figure2(const std::vector<ResultRow>& rows) {
  Grid g;
  g.header = {"setting", "iterations", "replication", "log_ml"};
  std::vector<const ResultRow*> sorted;
  for (const auto& r : rows) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const ResultRow* a, const ResultRow* b) {
    return std::tie(a->row, a->iterations, a->replication) < std::tie(b->row, b->iterations, b->replication);
  });
  TableOutput out;
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> by_budget;
  for (const auto* r : sorted) {
    if (!r->ok) ++out.missing_cells;
    g.rows.push_back({r->row, std::to_string(r->iterations), std::to_string(r->replication),
                      r->ok ? fixed4(r->log_ml) : kGap});
    if (r->ok) by_budget[{r->row, r->iterations}].push_back(r->log_ml);
  }
  out.csv = render_csv(g);
  Grid s;
  s.header = {"setting", "iterations", "runs", "mean", "sd"};
  for (const auto& [key, v] : by_budget) {
    s.rows.push_back({key.first, std::to_string(key.second), std::to_string(v.size()), fixed4(numkit::mean(v)),
                      v.size() > 1 ? fixed4(numkit::stddev(v)) : kGap});
  }
  out.markdown = render_markdown(s, "figure2");
  return out;
}

}  // namespace

TableOutput emit_table(const std::vector<ResultRow>& all, const std::string& layout) {
  const auto& layouts = known_layouts();
  if (std::find(layouts.begin(), layouts.end(), layout) == layouts.end()) {
    throw ReferenceError("unknown table layout '" + layout + "'");
  }
  std::vector<ResultRow> rows;
  for (const auto& r : all) {
    if (r.table == layout) rows.push_back(r);
  }
  if (layout == "figure2") return figure2(rows);

  std::vector<std::string> row_labels = required_rows(layout);
  std::vector<std::string> col_labels = required_columns(layout);
  std::map<std::string, std::size_t> reps_per_column;
  std::map<std::tuple<std::string, std::string, std::size_t>, const ResultRow*> cells;
  std::map<std::string, const ResultRow*> first_in_row;
  for (const auto& r : rows) {
    push_unique(row_labels, r.row);
    push_unique(col_labels, r.column);
    reps_per_column[r.column] = std::max(reps_per_column[r.column], r.replication + 1);
    cells[{r.row, r.column, r.replication}] = &r;
    first_in_row.emplace(r.row, &r);
  }

  Grid g;
  const bool toy_params = layout == "table1";
  g.header.push_back(toy_params ? "sigma0" : "");
  if (toy_params) {
    g.header.push_back("sigma1");
    g.header.push_back("D");
  }
  std::vector<std::pair<std::string, std::size_t>> columns;
  for (const auto& c : col_labels) {
    const std::size_t n = std::max<std::size_t>(1, reps_per_column[c]);
    for (std::size_t k = 0; k < n; ++k) {
      columns.emplace_back(c, k);
      g.header.push_back(n > 1 ? c + " " + std::to_string(k + 1) : c);
    }
  }
  TableOutput out;
  for (const auto& rl : row_labels) {
    std::vector<std::string> line;
    const auto it = first_in_row.find(rl);
    if (toy_params) {
      if (it != first_in_row.end()) {
        line = {fixed4(it->second->sigma0), fixed4(it->second->sigma1), fixed4(it->second->y)};
      } else {
        line = {rl, kGap, kGap};
      }
    } else {
      line.push_back(rl);
    }
    for (const auto& [c, k] : columns) {
      const auto cell = cells.find({rl, c, k});
      if (cell == cells.end() || !cell->second->ok) {
        line.push_back(kGap);
        ++out.missing_cells;
      } else {
        line.push_back(fixed4(cell->second->log_ml));
      }
    }
    g.rows.push_back(std::move(line));
  }
  out.markdown = render_markdown(g, layout);
  out.csv = render_csv(g);
  return out;
}

}  // namespace evidence::bench
