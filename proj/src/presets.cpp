#include "lure_pcac/presets.hpp"

#include <sstream>

namespace lure_pcac {

namespace {

// Second-order SISO plant G(q) = (q - 1)/(q^2 - q + 0.5) shared by the
// first two experiments.
void siso_plant(ConfigMap& c) {
  c["plant.A"] = "[[1, -0.5], [1, 0]]";
  c["plant.B"] = "[[1], [0]]";
  c["plant.C"] = "[[1, -1]]";
  c["plant.x0"] = "[1000, 0]";  // 1000 * B
}

void common_hyper(ConfigMap& c) {
  c["rls.theta0"] = "ones * 1e-10";
  c["rls.tau_n"] = "40";
  c["rls.tau_d"] = "200";
  c["rls.eta"] = "0.1";
  c["rls.alpha"] = "0.001";
  c["bpre.R1"] = "first_block";
  c["bpre.P_terminal"] = "first_block";
  c["bpre.horizon"] = "20";
  c["sim.k_engage"] = "100";
  c["sim.identify_during_open_loop"] = "false";
}

std::string alternating_impulses(long first_pos, long first_neg, long stride, long last_pos,
                                 long last_neg, const std::string& pos, const std::string& neg) {
  std::ostringstream out;
  out << "[";
  bool sep = false;
  for (long k = first_pos; k <= last_pos; k += stride) {
    out << (sep ? ", " : "") << "[" << k << ", " << pos << "]";
    sep = true;
  }
  for (long k = first_neg; k <= last_neg; k += stride)
    out << ", [" << k << ", " << neg << "]";
  out << "]";
  return out.str();
}

ConfigMap ex1() {
  ConfigMap c;
  siso_plant(c);
  common_hyper(c);
  c["gamma.kind"] = "tanh";
  c["rls.nhat"] = "10";
  c["rls.psi0"] = "eye * 1e-4";
  c["bpre.R2"] = "eye * 1e-4";
  c["sim.k_final"] = "1000";
  c["sector.K1"] = "zeros";
  c["sector.K2"] = "eye";
  c["sector.kappa"] = "eye";
  c["sector.K_L"] = "0";
  c["sector.N"] = "eye * 0.1";
  return c;
}

ConfigMap ex1p() {
  ConfigMap c = ex1();
  c["sim.k_final"] = "3000";
  c["schedule.impulses"] = alternating_impulses(1000, 1200, 400, 1800, 2000, "1", "-1");
  return c;
}

ConfigMap ex2() {
  ConfigMap c = ex1p();
  c["gamma.kind"] = "affine_sine";
  c["gamma.c1"] = "0.25";
  c["gamma.c2"] = "0.6";
  c["sector.K1"] = "[[0.115]]";
  c["sector.K2"] = "[[0.85]]";
  c["sector.kappa"] = "[[0.85]]";
  return c;
}

ConfigMap ex3() {
  ConfigMap c;
  c["plant.A"] = "[[0.5, 0, -0.25], [1, 0, 0], [0, 1, 0]]";
  c["plant.B"] = "[[1], [0], [0]]";
  c["plant.C"] = "[[1, -1, 0]]";
  c["plant.x0"] = "[1000, 0, 0]";
  common_hyper(c);
  c["gamma.kind"] = "gaussian_plus_piecewise";
  c["gamma.s_lo"] = "0.5";  // slopes must keep the outer branches inside the stable range
  c["gamma.s_hi"] = "0.5";
  c["rls.nhat"] = "20";
  c["rls.psi0"] = "eye * 1e-4";
  c["bpre.R2"] = "eye * 1e-6";
  c["sim.k_final"] = "3000";
  c["schedule.impulses"] = alternating_impulses(400, 500, 200, 2800, 2900, "5", "-5");
  c["sector.K1"] = "[[-0.4]]";
  c["sector.K2"] = "[[1.35]]";
  c["sector.kappa"] = "[[1.35]]";
  c["sector.K_L"] = "0";
  c["sector.N"] = "eye * 0.1";
  return c;
}

ConfigMap ex4() {
  ConfigMap c;
  c["plant.A"] =
      "[[1, -0.5, 0, 0, 0, 0, 0, 0],"
      " [1, 0, 0, 0, 0, 0, 0, 0],"
      " [0, 0, 0.8, -0.3, 0, 0, 0, 0],"
      " [0, 0, 0.5, 0, 0, 0, 0, 0],"
      " [0, 0, 0, 0, 1.4, -0.48, 0, 0],"
      " [0, 0, 0, 0, 1, 0, 0, 0],"
      " [0, 0, 0, 0, 0, 0, 0.6, -0.58],"
      " [0, 0, 0, 0, 0, 0, 1, 0]]";
  c["plant.B"] =
      "[[2, 0], [0, 0], [2, 0], [0, 0], [0, 2], [0, 0], [0, 2], [0, 0]]";
  c["plant.C"] =
      "[[0.5, -0.5, 0, 0, 0.5, -0.5, 0, 0],"
      " [0, 0, 0.5, -1, 0, 0, 0.5, -0.5]]";
  c["plant.x0"] = "[2000, 0, 2000, 0, 2000, 0, 2000, 0]";  // 1000 * B * [1; 1]
  common_hyper(c);
  c["gamma.kind"] = "diagonal";
  c["gamma.channel.1.kind"] = "tanh";
  c["gamma.channel.2.kind"] = "affine_sine";
  c["gamma.channel.2.c1"] = "0.25";
  c["gamma.channel.2.c2"] = "0.6";
  c["rls.nhat"] = "10";
  c["rls.psi0"] = "eye";
  c["bpre.R2"] = "eye * 1e-2";
  c["sim.k_final"] = "12000";
  c["schedule.impulses"] = alternating_impulses(2000, 3000, 2000, 10000, 11000, "5, 5", "-5, -5");
  c["sector.K1"] = "[[0, 0], [0, 0.115]]";
  c["sector.K2"] = "[[1, 0], [0, 0.85]]";
  c["sector.kappa"] = "[[1, 0], [0, 0.85]]";
  c["sector.K_L"] = "0";
  c["sector.N"] = "eye * 0.1";
  return c;
}

}  // namespace

ConfigMap preset(const std::string& name) {
  if (name == "ex1") return ex1();
  if (name == "ex1p") return ex1p();
  if (name == "ex2") return ex2();
  if (name == "ex3") return ex3();
  if (name == "ex4") return ex4();
  throw std::invalid_argument("unknown preset '" + name + "' (expected ex1|ex1p|ex2|ex3|ex4)");
}

std::vector<std::string> preset_names() { return {"ex1", "ex1p", "ex2", "ex3", "ex4"}; }

}  // namespace lure_pcac
