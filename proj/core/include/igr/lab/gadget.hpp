#pragma once

#include <vector>

#include "igr/lab/cnf.hpp"

namespace igr::lab {

struct GadgetFragment {
  std::vector<Clause> clauses;
  int auxiliary = 0;  // fresh variables numbered var_offset+1 ... var_offset+auxiliary
};

/// Clauses forcing the XOR of the masked variables to be False (even parity).
/// mask[i] selects variable i+1. Chains t_1 = v_a XOR v_b, t_l = v_c XOR t_{l-1},
/// expands each x1 XOR x2 = x3 into four clauses, and ends with (-t -t -t).
/// A single selected variable v yields just (-v -v -v).
GadgetFragment xor_parity_gadget(const std::vector<bool>& mask, int var_offset);

/// f AND gadget(mask) as one formula with the auxiliary variables appended.
CnfFormula with_parity_constraint(const CnfFormula& f, const std::vector<bool>& mask);

}  // namespace igr::lab
