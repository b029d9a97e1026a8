#include "igr/lab/gadget.hpp"

#include "igr/error.hpp"

namespace igr::lab {

namespace {

/// x1 XOR x2 = x3 as four 3-clauses.
void emit_xor(std::vector<Clause>& out, int x1, int x2, int x3) {
  out.push_back({-x1, -x2, -x3});
  out.push_back({x1, -x2, x3});
  out.push_back({-x1, x2, x3});
  out.push_back({x1, x2, -x3});
}

}  // namespace

GadgetFragment xor_parity_gadget(const std::vector<bool>& mask, int var_offset) {
  std::vector<int> vars;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) vars.push_back(static_cast<int>(i) + 1);
  if (vars.empty()) throw ValidationError("parity mask must select at least one variable");
  GadgetFragment g;
  int acc = vars[0];
  for (std::size_t i = 1; i < vars.size(); ++i) {
    const int t = var_offset + (++g.auxiliary);
    emit_xor(g.clauses, vars[i], acc, t);
    acc = t;
  }
  g.clauses.push_back({-acc, -acc, -acc});
  return g;
}

CnfFormula with_parity_constraint(const CnfFormula& f, const std::vector<bool>& mask) {
  if (static_cast<int>(mask.size()) != f.n_vars) throw ValidationError("mask length must equal the variable count");
  auto g = xor_parity_gadget(mask, f.n_vars);
  CnfFormula out = f;
  out.n_vars += g.auxiliary;
  out.clauses.insert(out.clauses.end(), g.clauses.begin(), g.clauses.end());
  out.validate();
  return out;
}

}  // namespace igr::lab
