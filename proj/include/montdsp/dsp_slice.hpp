#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>

namespace montdsp {

class DspConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr unsigned kDspWidth = 48;
inline constexpr std::uint64_t kDspMask = (std::uint64_t{1} << kDspWidth) - 1;
inline constexpr unsigned kCascadeShift = 17;

// Subset of the DSP48E2 OPMODE/CARRYINSEL multiplexers used by the models:
// P = X + Y + Z + CIN
enum class XMux { Zero, Product, AB };
enum class YMux { Zero, C };
enum class ZMux { Zero, Pcin, PcinShift17, P, PShift17 };
enum class CarryMux { Zero, Cascade };

struct OpMode {
  XMux x = XMux::Product;
  YMux y = YMux::Zero;
  ZMux z = ZMux::Zero;
  CarryMux carry = CarryMux::Zero;
};

// Static register configuration. The P register is always enabled.
struct DspPipeline {
  unsigned a_regs = 1;  // A1/A2: 0..2
  unsigned b_regs = 1;  // B1/B2: 0..2
  bool c_reg = true;    // C1
  bool m_reg = true;

  /// Input-to-P latency of the multiplier path.
  constexpr unsigned multiply_latency() const { return std::max(a_regs, b_regs) + (m_reg ? 1 : 0) + 1; }
  /// Input-to-P latency of the A:B / C adder path.
  constexpr unsigned add_latency() const { return std::max({a_regs, b_regs, c_reg ? 1U : 0U}) + 1; }
};

struct DspPorts {
  std::int64_t a = 0;  // 27-bit signed for the multiplier, 30-bit field for A:B
  std::int64_t b = 0;  // 18-bit signed
  std::uint64_t c = 0; // 48-bit
  std::uint64_t pcin = 0;
  bool carry_cascade_in = false;
  OpMode opmode{};
};

/// Behavioral DSP48E2 slice: 27x18 signed multiplier, 48-bit three-input
/// adder, A/B/C/M/P registers and the PCIN/PCOUT and CARRYCASCIN/OUT links.
///
/// tick() is one rising clock edge. Values presented on the ports before a
/// tick enter the first enabled register stage; P reflects the adder output
/// computed from the register contents before the edge. The OPMODE is taken
/// from the same ports bundle, i.e. it is treated as unregistered.
class DspSlice {
 public:
  DspSlice() = default;
  explicit DspSlice(DspPipeline pipe) : pipe_(pipe) {
    if (pipe.a_regs > 2 || pipe.b_regs > 2) throw DspConfigError("A/B register depth must be 0..2");
  }

  const DspPipeline& pipeline() const { return pipe_; }

  void tick(const DspPorts& in) {
    check_ports(in);

    const std::int64_t a_eff = pipe_.a_regs ? a_pipe_[pipe_.a_regs - 1] : in.a;
    const std::int64_t b_eff = pipe_.b_regs ? b_pipe_[pipe_.b_regs - 1] : in.b;
    const std::uint64_t c_eff = pipe_.c_reg ? c_reg_ : in.c;
    const std::int64_t product = sign_extend(a_eff, 27) * sign_extend(b_eff, 18);
    const std::int64_t m_eff = pipe_.m_reg ? m_reg_ : product;

    std::uint64_t x = 0;
    switch (in.opmode.x) {
      case XMux::Zero: break;
      case XMux::Product: x = static_cast<std::uint64_t>(m_eff) & kDspMask; break;
      case XMux::AB:
        x = ((static_cast<std::uint64_t>(a_eff) & ((1ULL << 30) - 1)) << 18) |
            (static_cast<std::uint64_t>(b_eff) & ((1ULL << 18) - 1));
        break;
    }
    const std::uint64_t y = in.opmode.y == YMux::C ? c_eff : 0;
    std::uint64_t z = 0;
    switch (in.opmode.z) {
      case ZMux::Zero: break;
      case ZMux::Pcin: z = in.pcin; break;
      case ZMux::PcinShift17: z = in.pcin >> kCascadeShift; break;
      case ZMux::P: z = p_; break;
      case ZMux::PShift17: z = p_ >> kCascadeShift; break;
    }
    const std::uint64_t cin = (in.opmode.carry == CarryMux::Cascade && in.carry_cascade_in) ? 1 : 0;
    const std::uint64_t sum = x + y + z + cin;

    // Register updates (all on the same edge).
    p_ = sum & kDspMask;
    carry_out_ = (sum >> kDspWidth) != 0;
    m_reg_ = product;
    c_reg_ = in.c;
    shift(a_pipe_, pipe_.a_regs, in.a);
    shift(b_pipe_, pipe_.b_regs, in.b);
  }

  std::uint64_t p() const { return p_; }
  std::uint64_t pcout() const { return p_; }
  bool carry_cascade_out() const { return carry_out_; }

  void reset() { *this = DspSlice(pipe_); }

 private:
  static std::int64_t sign_extend(std::int64_t v, unsigned bits) {
    const std::uint64_t m = (1ULL << bits) - 1;
    std::uint64_t u = static_cast<std::uint64_t>(v) & m;
    if (u >> (bits - 1)) u |= ~m;
    return static_cast<std::int64_t>(u);
  }

  void check_ports(const DspPorts& in) const {
    if (in.opmode.x == XMux::AB) {
      if (in.a < 0 || in.a >= (1LL << 30) || in.b < 0 || in.b >= (1LL << 18)) {
        throw DspConfigError("A:B operand wider than the 48-bit concatenated port");
      }
    } else {
      if (in.a < -(1LL << 26) || in.a >= (1LL << 26)) throw DspConfigError("A port value exceeds 27-bit signed");
      if (in.b < -(1LL << 17) || in.b >= (1LL << 17)) throw DspConfigError("B port value exceeds 18-bit signed");
    }
    if (in.c > kDspMask) throw DspConfigError("C port value exceeds 48 bits");
    if (in.pcin > kDspMask) throw DspConfigError("PCIN value exceeds 48 bits");
  }

  static void shift(std::array<std::int64_t, 2>& pipe, unsigned depth, std::int64_t v) {
    if (depth == 2) pipe[1] = pipe[0];
    if (depth >= 1) pipe[0] = v;
  }

  DspPipeline pipe_{};
  std::array<std::int64_t, 2> a_pipe_{};
  std::array<std::int64_t, 2> b_pipe_{};
  std::uint64_t c_reg_ = 0;
  std::int64_t m_reg_ = 0;
  std::uint64_t p_ = 0;
  bool carry_out_ = false;
};

}  // namespace montdsp
