#pragma once

#include <vector>

#include "pka/lang/program.hpp"

namespace pka {

/// A boolean expression as a disjunction of conjunctions of guards, with the
/// same desugaring of comparisons as the flow-graph compiler.
inline std::vector<std::vector<Guard>> guard_dnf(const BExpPtr& b, bool negated = false) {
  switch (b->kind) {
    case BExp::Kind::Not:
      return guard_dnf(b->a, !negated);
    case BExp::Kind::And:
    case BExp::Kind::Or: {
      auto l = guard_dnf(b->a, negated);
      auto r = guard_dnf(b->b, negated);
      bool conj = (b->kind == BExp::Kind::And) != negated;
      if (!conj) {
        l.insert(l.end(), r.begin(), r.end());
        return l;
      }
      std::vector<std::vector<Guard>> out;
      for (const auto& x : l)
        for (const auto& y : r) {
          auto z = x;
          z.insert(z.end(), y.begin(), y.end());
          out.push_back(std::move(z));
        }
      return out;
    }
    case BExp::Kind::Cmp:
      break;
  }
  CmpOp op = b->cmp;
  if (negated) {
    static const CmpOp flip[] = {CmpOp::Ge, CmpOp::Gt, CmpOp::Le, CmpOp::Lt, CmpOp::Ne, CmpOp::Eq};
    op = flip[static_cast<int>(op)];
  }
  const ExpPtr& l = b->l;
  const ExpPtr& r = b->r;
  auto plus1 = [](const ExpPtr& e) { return Exp::binary(BinOp::Add, e, Exp::integer(1)); };
  switch (op) {
    case CmpOp::Lt: return {{Guard{r, plus1(l)}}};
    case CmpOp::Le: return {{Guard{r, l}}};
    case CmpOp::Gt: return {{Guard{l, plus1(r)}}};
    case CmpOp::Ge: return {{Guard{l, r}}};
    case CmpOp::Eq: return {{Guard{l, r}, Guard{r, l}}};
    case CmpOp::Ne: return {{Guard{l, plus1(r)}}, {Guard{r, plus1(l)}}};
  }
  return {};
}

}  // namespace pka
