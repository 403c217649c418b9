#include <atomic>
#include <cstdlib>
#include <string>

#include "chemotax/error.hpp"
#include "chemotax/kernels.hpp"

namespace chemotax::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(CHEMOTAX_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa default_isa() {
  if (const char* env = std::getenv("CHEMOTAX_ISA")) {
    const Isa requested = parse_isa(env);
    if (isa_available(requested)) return requested;
  }
  return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> ptr{&table(default_isa())};
  return ptr;
}

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return cpu_has_avx2();
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!isa_available(isa)) throw InvalidArgument("kernel variant not available on this CPU/build");
#if defined(CHEMOTAX_HAVE_AVX2)
  if (isa == Isa::avx2) return detail::avx2_table;
#endif
  return detail::scalar_table;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Isa isa) { current().store(&table(isa), std::memory_order_release); }

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  throw InvalidArgument("unknown kernel variant '" + std::string(name) + "'");
}

}  // namespace chemotax::kernels
