#include "mspar/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "mspar/common.hpp"

namespace mspar::kernels {

const Table& scalar_table();   // kernels_scalar.cpp
const Table* avx2_table();     // kernels_avx2.cpp, nullptr off x86-64
const Table* neon_table();     // kernels_neon.cpp, nullptr off aarch64

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool cpu_has_neon() {
#if defined(__aarch64__)
  return true;  // advanced SIMD is mandatory on aarch64
#else
  return false;
#endif
}

struct Dispatch {
  Isa isa;
  const Table* table;
};

Dispatch detect() {
  if (const char* env = std::getenv("MSPAR_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return {Isa::scalar, &scalar_table()};
    if (std::strcmp(env, "avx2") == 0) {
      require(available(Isa::avx2), "MSPAR_KERNELS=avx2 but AVX2+FMA is not available on this CPU");
      return {Isa::avx2, avx2_table()};
    }
    if (std::strcmp(env, "neon") == 0) {
      require(available(Isa::neon), "MSPAR_KERNELS=neon but NEON is not available on this CPU");
      return {Isa::neon, neon_table()};
    }
    fail("unrecognized MSPAR_KERNELS value '", env, "' (expected scalar, avx2 or neon)");
  }
  if (cpu_has_avx2()) return {Isa::avx2, avx2_table()};
  if (cpu_has_neon()) return {Isa::neon, neon_table()};
  return {Isa::scalar, &scalar_table()};
}

Dispatch& dispatch() {
  static Dispatch d = detect();
  return d;
}

}  // namespace

const char* name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "?";
}

bool available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return cpu_has_avx2() && avx2_table() != nullptr;
    case Isa::neon: return cpu_has_neon() && neon_table() != nullptr;
  }
  return false;
}

Isa active() { return dispatch().isa; }

const Table& table() { return *dispatch().table; }

const Table& table_for(Isa isa) {
  require(available(isa), "kernel variant '", name(isa), "' is not available on this CPU");
  switch (isa) {
    case Isa::scalar: return scalar_table();
    case Isa::avx2: return *avx2_table();
    case Isa::neon: return *neon_table();
  }
  fail("unreachable");
}

void force(Isa isa) {
  const Table& t = table_for(isa);
  dispatch() = {isa, &t};
}

}  // namespace mspar::kernels
