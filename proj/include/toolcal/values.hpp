#pragma once

#include "toolcal/types.hpp"

namespace toolcal {

// Canonical kind of a JSON literal. Integral floats count as Integer after
// canonicalization; null/binary are not legal argument values and throw.
ValueKind kind_of(const json & v);

// True when a JSON value (recursively) contains only the six legal kinds.
bool is_legal_value(const json & v);

// Deterministic canonical form used before any value comparison:
//   strings   -> trimmed of leading/trailing ASCII whitespace, case preserved
//   integers  -> kept as 64-bit integers
//   numbers   -> integral floats collapse to integers, others stay doubles
//   booleans  -> unchanged
//   arrays    -> canonicalized element-wise, order preserved
//   objects   -> canonicalized values, keys sorted
// There is no cross-kind coercion ("5%" never becomes 0.05).
json canonical_value(const json & v);

// Spec-carrying overload; the kind never alters the canonical form.
json canonicalize_value(const json & v, const ParamSpec & spec);

bool values_equal(const json & a, const json & b);

// Does the value's canonical kind satisfy the declared kind? Number accepts
// both integral and fractional numerics; Integer requires an integral one.
bool kind_matches(const json & v, ValueKind declared);

// True when the value satisfies a single constraint / all constraints of a
// ParamSpec. A constraint that does not apply to the value's kind (a numeric
// range checked against a string, say) counts as violated.
bool satisfies(const json & v, const Constraint & c);
bool satisfies_all(const json & v, const ParamSpec & spec);

// Canonical JSON form of a whole call: {"name":..., "arguments":{...}} with
// canonicalized, key-sorted arguments.
json canonical_call(const ToolCall & c);

// Order-insensitive multiset equality of canonical calls (the exactness
// check behind r_exact).
bool calls_exactly_equal(const std::vector<ToolCall> & a, const std::vector<ToolCall> & b);

}  // namespace toolcal
