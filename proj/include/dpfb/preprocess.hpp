#pragma once

#include "dpfb/ast.hpp"

namespace dpfb {

/// Semantics-preserving normalization applied before analysis:
///  - compound assignments and statement-level ++/-- become plain assignments;
///  - multi-target scanf calls are split, declarations with initializers are
///    split into a declaration and an assignment;
///  - `while (x--) B` is made explicit, `i = e; while (c) { ...; i = i + k; }`
///    becomes a for loop;
///  - `scanf(&a[c]); for (i = c + 1; ...) scanf(&a[i]);` is merged into one loop;
///  - `scanf(&x); a[e] = x;` reads directly into `a[e]`;
///  - a scalar read once per iteration of a loop nest that also writes arrays
///    is backed by a fresh input array (a note is attached to the program).
/// Rewrites that do not apply are skipped. The result is renumbered.
Program preprocess(const Program& p);

/// Remove an outermost testcase loop from `main`: `scanf(&t); while (t--) B`
/// or `scanf(&t); for (k = 0; k < t; k++) B` where neither t nor k is used
/// anywhere else. Otherwise returns p unchanged (with a note when the shape
/// matched but t or k is used elsewhere).
Program strip_testcase_loop(const Program& p);

}  // namespace dpfb
