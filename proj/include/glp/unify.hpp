#pragma once

#include "glp/store.hpp"

#include <string>
#include <vector>

namespace glp {

enum class FailReason { Clash, Cycle, WriterWriter, ReaderNeedsValue };
const char* fail_reason_name(FailReason r);

struct UnifyOutcome {
  enum class Kind { Success, Suspend, Fail };
  Kind kind = Kind::Fail;
  // Writer mgu in binding order: (writer id, value). Values may mention other bound writers.
  std::vector<std::pair<uint64_t, Term>> bindings;
  std::vector<Term> blockers;  // readers, for Suspend
  FailReason reason = FailReason::Clash;

  bool success() const { return kind == Kind::Success; }
  bool suspended() const { return kind == Kind::Suspend; }
  bool failed() const { return kind == Kind::Fail; }
  Substitution substitution() const;

  static UnifyOutcome fail(FailReason r) {
    UnifyOutcome o;
    o.kind = Kind::Fail;
    o.reason = r;
    return o;
  }
};

struct UnifyOptions {
  // Readers with id >= local_from belong to a freshly renamed clause; nothing outside the
  // attempt can ever bind them, so they never become blockers. 0 disables the filter.
  uint64_t local_from = 0;
};

UnifyOutcome writer_unify(const Term& a, const Term& b, const View& view, UnifyOptions opts = {});
UnifyOutcome unify_equations(const std::vector<std::pair<Term, Term>>& eqs, const View& view,
                             UnifyOptions opts = {});

}  // namespace glp
