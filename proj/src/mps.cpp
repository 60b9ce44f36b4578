#include "ippmm/mps.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace ippmm {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream ss(line);
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

double parse_number(const std::string& tok, int line) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw ParseError(line, "expected a number, got '" + tok + "'");
  return v;
}

enum class Section {
  None, Name, ObjSense, Rows, Columns, Rhs, Ranges, Bounds, QuadObj, QMatrix, End
};

struct ParserState {
  RawProblem p;
  std::unordered_map<std::string, int> row_index;
  std::unordered_map<std::string, int> col_index;
  std::set<std::string> ignored_free_rows;  // N rows after the objective
  std::string obj_name;
  bool have_objective = false;
  std::string current_col;  // COLUMNS entries for one column must be contiguous
  std::vector<bool> lower_explicit;
  struct RawQuad { int i, j; double v; };
  std::vector<RawQuad> qmatrix_entries;
  bool saw_qmatrix = false;

  int row_of(const std::string& name, int line) {
    auto it = row_index.find(name);
    if (it == row_index.end())
      throw ParseError(line, "reference to undeclared row '" + name + "'");
    return it->second;
  }
  int col_of(const std::string& name, int line) {
    auto it = col_index.find(name);
    if (it == col_index.end())
      throw ParseError(line, "reference to undeclared column '" + name + "'");
    return it->second;
  }
  int ensure_col(const std::string& name) {
    auto it = col_index.find(name);
    if (it != col_index.end()) return it->second;
    int idx = p.num_cols();
    col_index.emplace(name, idx);
    p.col_names.push_back(name);
    p.c.push_back(0.0);
    p.lower.push_back(0.0);
    p.upper.push_back(kInf);
    lower_explicit.push_back(false);
    return idx;
  }
};

void handle_row(ParserState& st, const std::vector<std::string>& toks, int line) {
  if (toks.size() != 2) throw ParseError(line, "ROWS line needs 'type name'");
  const std::string& type = toks[0];
  const std::string& name = toks[1];
  if (st.row_index.count(name) || st.ignored_free_rows.count(name) ||
      name == st.obj_name)
    throw ParseError(line, "duplicate row '" + name + "'");
  if (type == "N" || type == "n") {
    if (!st.have_objective) {
      st.obj_name = name;
      st.have_objective = true;
    } else {
      st.ignored_free_rows.insert(name);  // extra free rows are dropped
    }
    return;
  }
  Relation rel;
  if (type == "E" || type == "e") rel = Relation::Eq;
  else if (type == "L" || type == "l") rel = Relation::Le;
  else if (type == "G" || type == "g") rel = Relation::Ge;
  else throw ParseError(line, "unknown row type '" + type + "'");
  st.row_index.emplace(name, st.p.num_rows());
  st.p.row_names.push_back(name);
  st.p.row_relations.push_back(rel);
  st.p.rhs.push_back(0.0);
  st.p.range.push_back(std::nullopt);
}

void handle_column(ParserState& st, const std::vector<std::string>& toks, int line) {
  if (toks.size() >= 3 && toks[1] == "'MARKER'")
    throw ParseError(line, "integer markers are not supported");
  if (toks.size() < 3 || toks.size() % 2 == 0)
    throw ParseError(line, "COLUMNS line needs 'column row value [row value]'");
  if (toks[0] != st.current_col && st.col_index.count(toks[0]))
    throw ParseError(line, "duplicate column '" + toks[0] + "'");
  st.current_col = toks[0];
  int col = st.ensure_col(toks[0]);
  for (size_t i = 1; i + 1 < toks.size(); i += 2) {
    const std::string& row = toks[i];
    double v = parse_number(toks[i + 1], line);
    if (row == st.obj_name) {
      st.p.c[col] += v;
    } else if (st.ignored_free_rows.count(row)) {
      continue;
    } else {
      st.p.entries.push_back({st.row_of(row, line), col, v});
    }
  }
}

void handle_rhs(ParserState& st, const std::vector<std::string>& toks, int line) {
  size_t first = toks.size() % 2 == 1 ? 1 : 0;  // odd count: set name present
  if (toks.size() < first + 2)
    throw ParseError(line, "RHS line needs 'row value' pairs");
  for (size_t i = first; i + 1 < toks.size(); i += 2) {
    const std::string& row = toks[i];
    double v = parse_number(toks[i + 1], line);
    if (row == st.obj_name) {
      st.p.objective_constant = -v;  // RHS on the objective row negates
    } else if (st.ignored_free_rows.count(row)) {
      continue;
    } else {
      st.p.rhs[st.row_of(row, line)] = v;
    }
  }
}

void handle_range(ParserState& st, const std::vector<std::string>& toks, int line) {
  size_t first = toks.size() % 2 == 1 ? 1 : 0;
  if (toks.size() < first + 2)
    throw ParseError(line, "RANGES line needs 'row value' pairs");
  for (size_t i = first; i + 1 < toks.size(); i += 2) {
    int r = st.row_of(toks[i], line);
    st.p.range[r] = parse_number(toks[i + 1], line);
  }
}

void handle_bound(ParserState& st, const std::vector<std::string>& toks, int line) {
  if (toks.empty()) return;
  const std::string& type = toks[0];
  bool needs_value = type == "UP" || type == "LO" || type == "FX";
  bool valueless = type == "FR" || type == "MI" || type == "PL";
  if (!needs_value && !valueless)
    throw ParseError(line, "unsupported bound type '" + type + "'");

  std::string colname;
  double value = 0;
  if (needs_value) {
    if (toks.size() == 4) { colname = toks[2]; value = parse_number(toks[3], line); }
    else if (toks.size() == 3) { colname = toks[1]; value = parse_number(toks[2], line); }
    else throw ParseError(line, "BOUNDS line needs 'type set column value'");
  } else {
    if (toks.size() == 3) colname = toks[2];
    else if (toks.size() == 2) colname = toks[1];
    else throw ParseError(line, "BOUNDS line needs 'type set column'");
  }
  int col = st.col_of(colname, line);

  if (type == "UP") {
    st.p.upper[col] = value;
    // classic convention: a negative upper bound with no explicit lower
    // bound frees the lower side
    if (value < 0 && !st.lower_explicit[col]) st.p.lower[col] = -kInf;
  } else if (type == "LO") {
    st.p.lower[col] = value;
    st.lower_explicit[col] = true;
  } else if (type == "FX") {
    st.p.lower[col] = st.p.upper[col] = value;
    st.lower_explicit[col] = true;
  } else if (type == "FR") {
    st.p.lower[col] = -kInf;
    st.p.upper[col] = kInf;
    st.lower_explicit[col] = true;
  } else if (type == "MI") {
    st.p.lower[col] = -kInf;
    st.lower_explicit[col] = true;
  } else if (type == "PL") {
    st.p.upper[col] = kInf;
  }
}

void handle_quad(ParserState& st, Section sec, const std::vector<std::string>& toks,
                 int line) {
  if (toks.size() != 3)
    throw ParseError(line, "quadratic line needs 'column column value'");
  int i = st.col_of(toks[0], line);
  int j = st.col_of(toks[1], line);
  double v = parse_number(toks[2], line);
  if (sec == Section::QuadObj) {
    // entry implies its symmetric counterpart
    st.p.quad.push_back({std::max(i, j), std::min(i, j), v});
  } else {
    st.saw_qmatrix = true;
    st.qmatrix_entries.push_back({i, j, v});
  }
}

// QMATRIX lists the full matrix; fold to one entry per unordered pair after
// checking symmetry.
void finalize_qmatrix(ParserState& st) {
  if (!st.saw_qmatrix) return;
  std::map<std::pair<int, int>, double> acc;
  for (const auto& e : st.qmatrix_entries)
    acc[{e.i, e.j}] += e.v;
  for (const auto& [key, v] : acc) {
    auto [i, j] = key;
    if (i == j) {
      st.p.quad.push_back({i, j, v});
      continue;
    }
    if (i < j) continue;  // handled from the (j,i) side
    auto mirror = acc.find({j, i});
    double mv = mirror == acc.end() ? 0.0 : mirror->second;
    if (std::abs(v - mv) > 1e-12 * std::max(1.0, std::abs(v)))
      throw ModelError("QMATRIX is not symmetric at (" + st.p.col_names[i] +
                       ", " + st.p.col_names[j] + ")");
    st.p.quad.push_back({i, j, v});
  }
  // lower-triangle entries whose mirror is missing entirely
  for (const auto& [key, v] : acc) {
    auto [i, j] = key;
    if (i >= j) continue;
    if (!acc.count({j, i}) && std::abs(v) > 0)
      throw ModelError("QMATRIX is not symmetric at (" + st.p.col_names[i] +
                       ", " + st.p.col_names[j] + ")");
  }
}

Section section_of(const std::string& kw, int line) {
  if (kw == "NAME") return Section::Name;
  if (kw == "OBJSENSE") return Section::ObjSense;
  if (kw == "ROWS") return Section::Rows;
  if (kw == "COLUMNS") return Section::Columns;
  if (kw == "RHS") return Section::Rhs;
  if (kw == "RANGES") return Section::Ranges;
  if (kw == "BOUNDS") return Section::Bounds;
  if (kw == "QUADOBJ") return Section::QuadObj;
  if (kw == "QMATRIX") return Section::QMatrix;
  if (kw == "ENDATA") return Section::End;
  throw ParseError(line, "unknown section '" + kw + "'");
}

void apply_objsense(ParserState& st, const std::string& word, int line) {
  if (word == "MAX" || word == "MAXIMIZE")
    st.p.sense = ObjSense::Maximize;
  else if (word == "MIN" || word == "MINIMIZE")
    st.p.sense = ObjSense::Minimize;
  else
    throw ParseError(line, "OBJSENSE must be MIN or MAX, got '" + word + "'");
}

}  // namespace

RawProblem parse_qps(std::istream& in) {
  ParserState st;
  Section sec = Section::None;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '*') continue;
    bool header = !std::isspace(static_cast<unsigned char>(line[0]));
    auto toks = tokenize(line);
    if (toks.empty()) continue;

    if (header) {
      sec = section_of(toks[0], lineno);
      if (sec == Section::Name && toks.size() > 1) st.p.name = toks[1];
      if (sec == Section::ObjSense && toks.size() > 1)
        apply_objsense(st, toks[1], lineno);
      if (sec == Section::End) break;
      continue;
    }

    switch (sec) {
      case Section::ObjSense: apply_objsense(st, toks[0], lineno); break;
      case Section::Rows: handle_row(st, toks, lineno); break;
      case Section::Columns: handle_column(st, toks, lineno); break;
      case Section::Rhs: handle_rhs(st, toks, lineno); break;
      case Section::Ranges: handle_range(st, toks, lineno); break;
      case Section::Bounds: handle_bound(st, toks, lineno); break;
      case Section::QuadObj:
      case Section::QMatrix: handle_quad(st, sec, toks, lineno); break;
      case Section::Name: break;
      case Section::None:
        throw ParseError(lineno, "data before any section header");
      case Section::End: break;
    }
  }
  if (!st.have_objective)
    throw ParseError(lineno, "no objective (N) row declared");
  finalize_qmatrix(st);
  return std::move(st.p);
}

RawProblem parse_qps_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError(0, "cannot open '" + path + "'");
  return parse_qps(f);
}

}  // namespace ippmm
