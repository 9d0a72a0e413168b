#pragma once

#include "gflsr/types.hpp"

namespace gflsr {

/// Index of the entry with the largest magnitude; ties resolved by the lowest
/// index. Throws on a zero or non-finite vector ("degenerate direction").
Index dominant_index(const Vector& v);

/// Returns v or -v so that the largest-magnitude entry is nonnegative.
/// Idempotent, and canonicalize_sign(-v) == canonicalize_sign(v).
Vector canonicalize_sign(const Vector& v);

/// True when canonicalize_sign would flip the vector.
bool sign_flip_needed(const Vector& v);

/// Applies canonicalize_sign to every column in place.
void canonicalize_columns(Matrix& m);

}  // namespace gflsr
