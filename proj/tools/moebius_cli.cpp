// moebius: energy, flow, blowup, zoo, spectrum and verify subcommands.
//
// Exit codes: 0 ok, 1 verify failure, 2 usage/config/input error, 3 singularity alarm,
// 4 numerical failure, 5 concentration not reached.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "moebius/moebius.hpp"
#include "verify_suite.hpp"

namespace fs = std::filesystem;
using namespace moebius;

namespace {

enum Exit { kOk = 0, kVerifyFail = 1, kUsage = 2, kAlarm = 3, kNumerical = 4, kNotReached = 5 };

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::NotReached: return kNotReached;
    case ErrorKind::StepRejected: return kNumerical;
    default: return kUsage;
  }
}

ArcLengthCurve load_input(const std::string& path, std::size_t n) { return load_arclength_curve(path, n); }

// ---------------------------------------------------------------------------

struct EnergyArgs {
  std::string input;
  std::size_t n = 0;
  std::optional<double> local;
  std::string local_kind = "intrinsic";
  std::string local_out;
};

int cmd_energy(const EnergyArgs& a) {
  if (a.local && !(*a.local > 0.0)) throw Error(ErrorKind::ParamError, "--local radius must be positive");
  const ArcLengthCurve c = load_input(a.input, a.n);
  const EnergyReport e = mobius_energy(c);
  const DiagnosticsReport d = diagnose(c);
  std::cout << "energy=" << format_double(e.total) << '\n'
            << "length=" << format_double(e.length) << '\n'
            << "n=" << e.n << '\n'
            << "distortion=" << format_double(d.distortion) << '\n'
            << "distortion_bound=" << format_double(distortion_bound(e.total)) << '\n'
            << "m_threehalves=" << format_double(d.m_threehalves) << '\n'
            << "max_curv=" << format_double(d.max_curv) << '\n'
            << "curv_cv=" << format_double(d.curv_cv) << '\n';
  if (a.local) {
    LocalKind kind;
    if (a.local_kind == "intrinsic") kind = LocalKind::Intrinsic;
    else if (a.local_kind == "ball") kind = LocalKind::BallExtrinsic;
    else throw Error(ErrorKind::ParamError, "--local-kind must be intrinsic or ball");
    std::ofstream file;
    if (!a.local_out.empty()) {
      file.open(a.local_out);
      if (!file) throw Error(ErrorKind::ParamError, "cannot write " + a.local_out);
    }
    std::ostream& os = a.local_out.empty() ? std::cout : file;
    os << "node,value\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double v = kind == LocalKind::Intrinsic ? localized_energy_intrinsic(c, i, *a.local)
                                                    : localized_energy_ball(c, c.nodes[i], *a.local);
      os << i << ',' << format_double(v) << '\n';
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct FlowArgs {
  std::string config;
  std::string output;
};

void write_run_summary(const fs::path& dir, const Trajectory& traj, const std::string& message) {
  std::ofstream out(dir / "summary.txt");
  out << "stop=" << to_string(traj.stop) << '\n';
  out << "steps=" << (traj.records.empty() ? 0 : traj.records.back().step) << '\n';
  out << "rejected=" << traj.rejected_steps << '\n';
  out << "events=" << traj.events.size() << '\n';
  if (!traj.records.empty()) {
    out << "t=" << format_double(traj.records.back().t) << '\n';
    out << "energy=" << format_double(traj.records.back().energy) << '\n';
  }
  if (!traj.snapshots.empty()) {
    const CurvatureStats st = curvature_stats(traj.snapshots.back().curve);
    out << "curv_cv=" << format_double(st.cv) << '\n';
    out << "round=" << (st.cv < kRoundnessThreshold ? "true" : "false") << '\n';
  }
  if (!message.empty()) out << "message=" << message << '\n';
}

int cmd_flow(const FlowArgs& a) {
  const RunConfig cfg = load_run_config(a.config);
  const fs::path dir = !a.output.empty() ? fs::path(a.output) : !cfg.output.empty() ? fs::path(cfg.output) : fs::path("flow_out");
  const ArcLengthCurve start = cfg.input.empty() ? zoo::make(cfg.zoo, cfg.flow.n, cfg.zoo_params)
                                                 : load_input(cfg.input, cfg.flow.n);
  Trajectory traj;
  int code = kOk;
  std::string message;
  try {
    traj = run_flow(start, cfg.flow);
  } catch (const FlowFailure& f) {
    traj = f.partial();
    message = f.what();
    code = kNumerical;
  }
  write_trajectory_dir(dir, traj);
  write_run_summary(dir, traj, message);
  if (traj.stop == StopReason::SingularityAlarm) code = kAlarm;
  std::cout << "stop=" << to_string(traj.stop) << " steps=" << (traj.records.empty() ? 0 : traj.records.back().step)
            << " events=" << traj.events.size() << " output=" << dir.string() << '\n';
  if (!message.empty()) std::cerr << "moebius flow: " << message << '\n';
  return code;
}

// ---------------------------------------------------------------------------

struct BlowupArgs {
  std::string dir;
  double eps0 = kDefaultEps0;
  double r = 0.1;
  std::size_t refine = 1;
  std::string output;
  std::string local_kind = "intrinsic";
};

int cmd_blowup(const BlowupArgs& a) {
  if (!(a.eps0 > 0.0) || !(a.r > 0.0)) throw Error(ErrorKind::ParamError, "--eps0 and --r must be positive");
  const LocalKind kind = a.local_kind == "ball" ? LocalKind::BallExtrinsic : LocalKind::Intrinsic;
  const std::vector<Snapshot> snaps = read_snapshots(a.dir);
  const ConcentrationEvent ev = pick_concentration(snaps, a.eps0, a.r, kind);
  ProfileOptions opt;
  opt.refine = std::max<std::size_t>(1, a.refine);
  const BlowupProfile prof = extract_profile(snaps, ev, opt);
  const ProfileScores sc = classify_profile(prof);
  const fs::path out = a.output.empty() ? fs::path(a.dir) / "blowup" : fs::path(a.output);
  fs::create_directories(out);
  save_curve(out / "profile.curve", prof.curve);
  std::ofstream rep(out / "profile_report.txt");
  write_profile_report(rep, prof, sc, a.eps0);
  std::cout << "step=" << ev.step << " t=" << format_double(ev.t) << " node=" << ev.node
            << " value=" << format_double(ev.value) << " verdict=" << to_string(sc.verdict)
            << " output=" << out.string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

struct ZooArgs {
  std::string name;
  std::size_t n = 256;
  zoo::Params p;
  std::size_t frames = 8;
  double gap_start = 0.6;
  double gap_end = 0.1;
  std::string output;
};

int cmd_zoo(const ZooArgs& a) {
  if (a.name == "hairpin-family") {
    // Synthetic trajectory directory for the blow-up pipeline.
    if (a.output.empty()) throw Error(ErrorKind::ParamError, "hairpin-family needs -o <dir>");
    Trajectory traj;
    traj.r_list = FlowConfig{}.r_list;
    traj.snapshots = hairpin_family(a.n, a.frames, a.gap_start, a.gap_end);
    write_trajectory_dir(a.output, traj);
    return kOk;
  }
  const ArcLengthCurve c = zoo::make(a.name, a.n, a.p);
  if (a.output.empty()) {
    write_curve(std::cout, c);
  } else {
    save_curve(a.output, c);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct SpectrumArgs {
  std::size_t n = 256;
  double length = 2.0 * kPi;
  std::string curve;
};

int cmd_spectrum(const SpectrumArgs& a) {
  std::size_t n = a.n;
  double l = a.length;
  if (!a.curve.empty()) {
    const ArcLengthCurve c = load_input(a.curve, 0);
    n = c.size();
    l = c.length;
  }
  if (n < kMinNodes || n % 2 != 0) throw Error(ErrorKind::ParamError, "--n must be even and >= 16");
  if (!(l > 0.0)) throw Error(ErrorKind::ParamError, "--length must be positive");
  const SpectralSymbol& sym = spectral_symbol(n, l);
  std::cout << "k,q_k\n";
  for (std::size_t k = 0; k <= n / 2; ++k) std::cout << k << ',' << format_double(sym(k)) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string suite = "fast";
  bool break_gradient = false;
  std::uint64_t seed = 12345;
};

int cmd_verify(const VerifyArgs& a) {
  verify::Options opt;
  if (a.suite == "fast") opt.suite = verify::Suite::Fast;
  else if (a.suite == "full") opt.suite = verify::Suite::Full;
  else throw Error(ErrorKind::ParamError, "unknown suite '" + a.suite + "' (fast|full)");
  opt.break_gradient = a.break_gradient;
  opt.seed = a.seed;
  const int failures = verify::run_suite(opt, std::cout);
  std::cout << "summary failed=" << failures << " total=" << verify::criteria().size() << '\n';
  return failures == 0 ? kOk : kVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moebius energy gradient flow toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: MOEBIUS_THREADS, else 1)")->check(CLI::NonNegativeNumber);

  EnergyArgs ea;
  auto* energy = app.add_subcommand("energy", "energy and diagnostics of a curve file");
  energy->add_option("input", ea.input, "curve file")->required();
  energy->add_option("--n", ea.n, "resample to this many nodes (default: keep)");
  energy->add_option("--local", ea.local, "localization radius r; emits node,value CSV");
  energy->add_option("--local-kind", ea.local_kind, "intrinsic or ball");
  energy->add_option("--local-out", ea.local_out, "write the localization CSV here instead of stdout");

  FlowArgs fa;
  auto* flow = app.add_subcommand("flow", "run the gradient flow from a key=value config");
  flow->add_option("config", fa.config, "config file")->required();
  flow->add_option("-o,--output", fa.output, "output directory");

  BlowupArgs ba;
  auto* blowup = app.add_subcommand("blowup", "pick the first concentration and extract the profile");
  blowup->add_option("dir", ba.dir, "trajectory directory")->required();
  blowup->add_option("--eps0", ba.eps0, "concentration threshold");
  blowup->add_option("--r", ba.r, "localization radius");
  blowup->add_option("--refine", ba.refine, "profile node multiplier");
  blowup->add_option("--local-kind", ba.local_kind, "intrinsic or ball");
  blowup->add_option("-o,--output", ba.output, "output directory (default <dir>/blowup)");

  ZooArgs za;
  auto* zoo_cmd = app.add_subcommand("zoo", "write a test curve");
  zoo_cmd->add_option("name", za.name, "circle|ellipse|perturbed-circle|hairpin|trefoil|random-fourier|hairpin-family")
      ->required();
  zoo_cmd->add_option("--n", za.n, "node count");
  zoo_cmd->add_option("--radius", za.p.radius);
  zoo_cmd->add_option("--a", za.p.a);
  zoo_cmd->add_option("--b", za.p.b);
  zoo_cmd->add_option("--amplitude", za.p.amplitude);
  zoo_cmd->add_option("--mode", za.p.mode);
  zoo_cmd->add_option("--gap", za.p.gap, "hairpin gap");
  zoo_cmd->add_option("--gap-start", za.gap_start, "first gap for hairpin-family");
  zoo_cmd->add_option("--gap-end", za.gap_end, "last gap for hairpin-family");
  zoo_cmd->add_option("--frames", za.frames, "frames for hairpin-family");
  zoo_cmd->add_option("--seed", za.p.seed);
  zoo_cmd->add_option("--dim", za.p.dim)->check(CLI::IsMember({2, 3}));
  zoo_cmd->add_option("-o,--output", za.output, "output file (directory for hairpin-family); default stdout");

  SpectrumArgs sa;
  auto* spectrum = app.add_subcommand("spectrum", "dump the Qt symbol as k,q_k CSV");
  spectrum->add_option("--n", sa.n, "node count");
  spectrum->add_option("--length", sa.length, "curve length");
  spectrum->add_option("--curve", sa.curve, "take N and length from a curve file");

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance criteria");
  verify_cmd->add_option("suite", va.suite, "fast or full");
  verify_cmd->add_flag("--break-gradient", va.break_gradient, "fault injection: corrupt the gradient");
  verify_cmd->add_option("--seed", va.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  if (threads > 0) set_num_threads(threads);

  try {
    if (*energy) return cmd_energy(ea);
    if (*flow) return cmd_flow(fa);
    if (*blowup) return cmd_blowup(ba);
    if (*zoo_cmd) return cmd_zoo(za);
    if (*spectrum) return cmd_spectrum(sa);
    if (*verify_cmd) return cmd_verify(va);
  } catch (const Error& e) {
    std::cerr << "moebius: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "moebius: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
