/*
 * Copyright 2026 The ODT Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// MPS and LP writers plus an MPS reader for the files we write.
//
// Names are whitespace-delimited rather than column-positioned, so they may
// exceed the classic 8 characters; the reader tokenises accordingly.

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "odt/errors.h"
#include "odt/milp_model.h"

namespace odt {
namespace {

constexpr size_t kMaxNameLength = 255;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr const char* kObjRow = "OBJ";

std::string FormatNumber(double value) {
  if (value == std::floor(value) && std::abs(value) < 1e15) {
    return std::to_string(static_cast<long long>(value));
  }
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

void CheckName(const std::string& name) {
  if (name.empty() || name.size() > kMaxNameLength) {
    throw Error(ErrorCode::kNameOverflow,
                "identifier of length " + std::to_string(name.size()) +
                    " does not fit the file format");
  }
  for (char ch : name) {
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == ':') {
      throw Error(ErrorCode::kNameOverflow,
                  "identifier '" + name + "' contains a separator");
    }
  }
}

void CheckNames(const MilpModel& model) {
  CheckName(model.name);
  for (const Variable& v : model.variables) CheckName(v.name);
  for (const Constraint& r : model.constraints) CheckName(r.name);
}

// Column-major view of the constraint matrix.
std::vector<std::vector<std::pair<int, double>>> Columns(
    const MilpModel& model) {
  std::vector<std::vector<std::pair<int, double>>> cols(model.num_variables());
  for (int r = 0; r < model.num_constraints(); ++r) {
    for (const Term& t : model.constraints[r].terms) {
      cols[t.var].emplace_back(r, t.coef);
    }
  }
  return cols;
}

[[noreturn]] void Fail(int line, const std::string& what) {
  throw Error(ErrorCode::kParseError,
              "line " + std::to_string(line) + ": " + what);
}

double ParseNumber(const std::string& token, int line) {
  double value = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    if (token == "Inf" || token == "inf" || token == "1e+30" ||
        token == "Infinity") {
      return kInf;
    }
    if (token == "-Inf" || token == "-inf" || token == "-Infinity") {
      return -kInf;
    }
    Fail(line, "bad number '" + token + "'");
  }
  if (value >= 1e30) return kInf;
  if (value <= -1e30) return -kInf;
  return value;
}

std::vector<std::string> Tokens(std::string_view line) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r')) {
      ++i;
    }
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' &&
           line[j] != '\r') {
      ++j;
    }
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::string ExportMps(const MilpModel& model) {
  CheckNames(model);
  const auto cols = Columns(model);
  std::ostringstream out;
  out << "NAME          " << model.name << "\n";
  out << "OBJSENSE\n    " << (model.maximize ? "MAX" : "MIN") << "\n";
  out << "ROWS\n";
  out << " N  " << kObjRow << "\n";
  for (const Constraint& r : model.constraints) {
    out << ' ' << static_cast<char>(r.sense) << "  " << r.name << "\n";
  }
  out << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (int j = 0; j < model.num_variables(); ++j) {
    const Variable& v = model.variables[j];
    if (v.integer != in_int) {
      out << "    MARKER" << marker++ << "  'MARKER'  "
          << (v.integer ? "'INTORG'" : "'INTEND'") << "\n";
      in_int = v.integer;
    }
    const double obj = model.objective[j];
    if (obj != 0.0 || cols[j].empty()) {
      out << "    " << v.name << "  " << kObjRow << "  " << FormatNumber(obj)
          << "\n";
    }
    for (const auto& [row, coef] : cols[j]) {
      out << "    " << v.name << "  " << model.constraints[row].name << "  "
          << FormatNumber(coef) << "\n";
    }
  }
  if (in_int) out << "    MARKER" << marker++ << "  'MARKER'  'INTEND'\n";
  out << "RHS\n";
  for (const Constraint& r : model.constraints) {
    if (r.rhs != 0.0) {
      out << "    RHS  " << r.name << "  " << FormatNumber(r.rhs) << "\n";
    }
  }
  out << "BOUNDS\n";
  for (const Variable& v : model.variables) {
    if (v.lower == v.upper) {
      out << " FX BND  " << v.name << "  " << FormatNumber(v.lower) << "\n";
      continue;
    }
    if (v.lower == -kInf) {
      out << " MI BND  " << v.name << "\n";
    } else if (v.lower != 0.0) {
      out << " LO BND  " << v.name << "  " << FormatNumber(v.lower) << "\n";
    }
    if (v.upper != kInf) {
      out << " UP BND  " << v.name << "  " << FormatNumber(v.upper) << "\n";
    } else if (v.integer) {
      out << " PL BND  " << v.name << "\n";
    }
  }
  out << "ENDATA\n";
  return out.str();
}

MilpModel ParseMps(std::string_view text) {
  enum class Section { kNone, kObjSense, kRows, kColumns, kRhs, kBounds, kEnd };
  MilpModel model;
  model.maximize = false;  // MPS default without OBJSENSE
  model.objective.clear();
  Section section = Section::kNone;
  std::string obj_row;
  std::unordered_map<std::string, int> rows;
  std::unordered_map<std::string, int> cols;
  std::vector<char> upper_set;
  bool in_int = false;
  int line_no = 0;
  size_t pos = 0;

  auto column = [&](const std::string& name) -> int {
    if (auto it = cols.find(name); it != cols.end()) return it->second;
    const int id = static_cast<int>(model.variables.size());
    cols.emplace(name, id);
    Variable v;
    v.name = name;
    v.lower = 0.0;
    v.upper = kInf;
    v.integer = in_int;
    model.variables.push_back(std::move(v));
    model.objective.push_back(0.0);
    upper_set.push_back(0);
    return id;
  };
  auto find_column = [&](const std::string& name) -> int {
    auto it = cols.find(name);
    if (it == cols.end()) Fail(line_no, "unknown column '" + name + "'");
    return it->second;
  };

  while (pos < text.size() && section != Section::kEnd) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line[0] == '*') continue;
    const auto tok = Tokens(line);
    if (tok.empty()) continue;

    const bool header = line[0] != ' ' && line[0] != '\t';
    if (header) {
      const std::string& h = tok[0];
      if (h == "NAME") {
        model.name = tok.size() > 1 ? tok[1] : "";
        section = Section::kNone;
      } else if (h == "OBJSENSE") {
        section = Section::kObjSense;
        if (tok.size() > 1) {
          model.maximize = tok[1] == "MAX" || tok[1] == "MAXIMIZE";
          section = Section::kNone;
        }
      } else if (h == "ROWS") {
        section = Section::kRows;
      } else if (h == "COLUMNS") {
        section = Section::kColumns;
      } else if (h == "RHS") {
        section = Section::kRhs;
      } else if (h == "BOUNDS") {
        section = Section::kBounds;
      } else if (h == "ENDATA") {
        section = Section::kEnd;
      } else {
        Fail(line_no, "unsupported section '" + h + "'");
      }
      continue;
    }

    switch (section) {
      case Section::kObjSense:
        if (tok[0] == "MAX" || tok[0] == "MAXIMIZE") {
          model.maximize = true;
        } else if (tok[0] == "MIN" || tok[0] == "MINIMIZE") {
          model.maximize = false;
        } else {
          Fail(line_no, "bad objective sense '" + tok[0] + "'");
        }
        break;
      case Section::kRows: {
        if (tok.size() != 2) Fail(line_no, "row line needs type and name");
        const std::string& type = tok[0];
        if (type == "N") {
          if (obj_row.empty()) obj_row = tok[1];
          break;
        }
        Constraint r;
        r.name = tok[1];
        if (type == "L") {
          r.sense = Sense::kLe;
        } else if (type == "G") {
          r.sense = Sense::kGe;
        } else if (type == "E") {
          r.sense = Sense::kEq;
        } else {
          Fail(line_no, "bad row type '" + type + "'");
        }
        if (!rows.emplace(r.name, model.num_constraints()).second) {
          Fail(line_no, "duplicate row '" + r.name + "'");
        }
        model.constraints.push_back(std::move(r));
        break;
      }
      case Section::kColumns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") {
            in_int = true;
          } else if (tok[2] == "'INTEND'") {
            in_int = false;
          } else {
            Fail(line_no, "bad marker '" + tok[2] + "'");
          }
          break;
        }
        if (tok.size() != 3 && tok.size() != 5) {
          Fail(line_no, "column line needs one or two (row, value) pairs");
        }
        const int c = column(tok[0]);
        for (size_t t = 1; t + 1 < tok.size(); t += 2) {
          const double value = ParseNumber(tok[t + 1], line_no);
          if (tok[t] == obj_row) {
            model.objective[c] = value;
            continue;
          }
          auto it = rows.find(tok[t]);
          if (it == rows.end()) Fail(line_no, "unknown row '" + tok[t] + "'");
          if (value != 0.0) {
            model.constraints[it->second].terms.push_back({c, value});
          }
        }
        break;
      }
      case Section::kRhs: {
        if (tok.size() != 3 && tok.size() != 5) {
          Fail(line_no, "rhs line needs one or two (row, value) pairs");
        }
        for (size_t t = 1; t + 1 < tok.size(); t += 2) {
          const double value = ParseNumber(tok[t + 1], line_no);
          if (tok[t] == obj_row) continue;
          auto it = rows.find(tok[t]);
          if (it == rows.end()) Fail(line_no, "unknown row '" + tok[t] + "'");
          model.constraints[it->second].rhs = value;
        }
        break;
      }
      case Section::kBounds: {
        if (tok.size() < 3) Fail(line_no, "bound line too short");
        const std::string& type = tok[0];
        const int c = find_column(tok[2]);
        Variable& v = model.variables[c];
        auto value = [&] {
          if (tok.size() < 4) Fail(line_no, "bound needs a value");
          return ParseNumber(tok[3], line_no);
        };
        if (type == "UP") {
          v.upper = value();
          upper_set[c] = 1;
        } else if (type == "LO") {
          v.lower = value();
        } else if (type == "FX") {
          v.lower = v.upper = value();
          upper_set[c] = 1;
        } else if (type == "MI") {
          v.lower = -kInf;
        } else if (type == "PL") {
          v.upper = kInf;
          upper_set[c] = 1;
        } else if (type == "BV") {
          v.lower = 0.0;
          v.upper = 1.0;
          v.integer = true;
          upper_set[c] = 1;
        } else {
          Fail(line_no, "unsupported bound type '" + type + "'");
        }
        break;
      }
      case Section::kNone:
      case Section::kEnd:
        Fail(line_no, "data outside of a section");
    }
  }
  if (section != Section::kEnd) Fail(line_no, "missing ENDATA");
  for (Constraint& r : model.constraints) {
    std::sort(r.terms.begin(), r.terms.end(),
              [](const Term& a, const Term& b) { return a.var < b.var; });
  }
  model.RebuildIndex();
  return model;
}

std::string ExportLp(const MilpModel& model) {
  CheckNames(model);
  constexpr int kTermsPerLine = 8;
  std::ostringstream out;
  auto emit_terms = [&](const std::vector<std::pair<int, double>>& terms) {
    int count = 0;
    for (const auto& [var, coef] : terms) {
      if (count > 0 && count % kTermsPerLine == 0) out << "\n   ";
      out << (coef < 0 ? " - " : " + ") << FormatNumber(std::abs(coef)) << ' '
          << model.variables[var].name;
      ++count;
    }
    if (count == 0) out << " 0";
  };

  out << "\\ " << model.name << "\n";
  out << (model.maximize ? "Maximize" : "Minimize") << "\n obj:";
  std::vector<std::pair<int, double>> obj;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.objective[j] != 0.0) obj.emplace_back(j, model.objective[j]);
  }
  emit_terms(obj);
  out << "\nSubject To\n";
  for (const Constraint& r : model.constraints) {
    out << ' ' << r.name << ':';
    std::vector<std::pair<int, double>> terms;
    for (const Term& t : r.terms) terms.emplace_back(t.var, t.coef);
    emit_terms(terms);
    const char* op = r.sense == Sense::kLe ? "<=" : r.sense == Sense::kGe ? ">=" : "=";
    out << ' ' << op << ' ' << FormatNumber(r.rhs) << "\n";
  }
  out << "Bounds\n";
  for (const Variable& v : model.variables) {
    if (v.lower == v.upper) {
      out << ' ' << v.name << " = " << FormatNumber(v.lower) << "\n";
    } else if (v.lower == -kInf && v.upper == kInf) {
      out << ' ' << v.name << " free\n";
    } else {
      out << ' ' << (v.lower == -kInf ? "-inf" : FormatNumber(v.lower))
          << " <= " << v.name << " <= "
          << (v.upper == kInf ? "+inf" : FormatNumber(v.upper)) << "\n";
    }
  }
  bool any_int = false;
  for (const Variable& v : model.variables) any_int |= v.integer;
  if (any_int) {
    out << "General\n";
    int count = 0;
    for (const Variable& v : model.variables) {
      if (!v.integer) continue;
      out << (count % kTermsPerLine == 0 ? (count ? "\n " : " ") : " ")
          << v.name;
      ++count;
    }
    out << "\n";
  }
  out << "End\n";
  return out.str();
}

}  // namespace odt
