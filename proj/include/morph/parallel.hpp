#pragma once

namespace morph {

// Thread count used by the OpenMP kernel variants. Every parallel kernel also
// has a serial path (threads <= 1) that is the reference implementation; the
// unit tests compare the two and the bench target times them.
void set_threads(int n);
int threads();

// True if this build has OpenMP support.
bool openmp_enabled();

}  // namespace morph
