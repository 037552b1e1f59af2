#pragma once

#include <ostream>

namespace flowdecomp {

/// `flowdecomp <simulate|decompose|freeze|stopgo|montecarlo|example> ...`.
/// Returns 0 on success, 1 on a failed run or failing example, 2 on usage errors.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace flowdecomp
