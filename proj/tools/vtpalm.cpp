#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "plot.hpp"
#include "vtpalm/control.hpp"
#include "vtpalm/image_io.hpp"
#include "vtpalm/image_ops.hpp"
#include "vtpalm/mapper.hpp"
#include "vtpalm/proximity.hpp"
#include "vtpalm/random.hpp"
#include "vtpalm/recon.hpp"
#include "vtpalm/scenario.hpp"
#include "vtpalm/scene.hpp"
#include "vtpalm/tactile.hpp"
#include "vtpalm/texture.hpp"

namespace fs = std::filesystem;
using namespace vtpalm;

namespace {

struct Globals {
  std::uint64_t seed = 42;
  bool seed_given = false;
  int jobs = 1;
  std::string out;
  std::string config;
  std::vector<std::string> sets;

  KeyValueConfig cfg;  // merged: --config file, then --set overrides
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// Inputs that do not exist as given are looked up under VTPALM_DATA_DIR.
fs::path resolve_input(const std::string& p) {
  fs::path path(p);
  if (fs::exists(path) || path.is_absolute()) return path;
  if (const char* root = std::getenv("VTPALM_DATA_DIR")) {
    const fs::path alt = fs::path(root) / path;
    if (fs::exists(alt)) return alt;
  }
  return path;
}

fs::path default_out() {
  if (const char* root = std::getenv("VTPALM_DATA_DIR")) return fs::path(root) / "out";
  return "out";
}

void merge_into(KeyValueConfig& dst, const KeyValueConfig& src) {
  for (const auto& [k, v] : src.entries()) dst.set(k, v);
}

std::uint64_t fnv1a64(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  require(in.good(), ErrorKind::IoFailure, "cannot read " + p.string());
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

// Produced files, their sizes and hashes; no timestamps so reruns compare equal.
void write_manifest(const fs::path& out, const std::string& command, std::uint64_t seed) {
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(out)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), out).generic_string();
    if (rel != "manifest.txt") files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  std::ofstream m(out / "manifest.txt");
  require(m.good(), ErrorKind::IoFailure, "cannot write manifest in " + out.string());
  m << "command=" << command << "\nseed=" << seed << "\n";
  for (const auto& f : files) {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a64(out / f));
    m << "file=" << f << " bytes=" << fs::file_size(out / f) << " fnv1a64=" << hash << "\n";
  }
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream o(p);
  require(o.good(), ErrorKind::IoFailure, "cannot write " + p.string());
  o << text;
}

recon::Laplacian parse_laplacian(const std::string& s) {
  if (s == "continuous") return recon::Laplacian::Continuous;
  if (s == "discrete") return recon::Laplacian::Discrete;
  fail(ErrorKind::InvalidArgument, "laplacian must be continuous or discrete, got '" + s + "'");
}

void write_height_outputs(const fs::path& out, const HeightMap& h, const GradientField& g) {
  write_vtp1(out / "height.vtp", to_planes(h));
  write_planes_csv(out / "height.csv", to_planes(h));
  save_image(field_to_heat(h.z), out / "height_heat.png");
  save_image(field_to_gray(recon::normal_z(g)), out / "normal_z.png");
  write_vtp1(out / "gradients.vtp", to_planes(g));
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string samples;
  std::optional<double> min_z_world;
};

void cmd_fit_proximity(const Globals& gl, const fs::path& out, const FitArgs& a) {
  const auto samples = proximity::read_samples_csv(resolve_input(a.samples));
  require(!samples.empty(), ErrorKind::InsufficientSamples, "no samples in " + a.samples);
  proximity::FitConfig fc;
  fc.min_z_world = a.min_z_world.value_or(gl.cfg.get_double("min_z_world", fc.min_z_world));
  fc.starts = static_cast<std::size_t>(gl.cfg.get_long("fit_starts", static_cast<long>(fc.starts)));
  fc.max_iterations = static_cast<std::size_t>(gl.cfg.get_long("fit_max_iterations", static_cast<long>(fc.max_iterations)));

  const auto rep = proximity::fit_double_exp(samples, fc);
  const auto ranked = proximity::rank_families(rep, proximity::fit_alternative_models(samples, fc));
  const auto& m = rep.model;
  proximity::write_model(out / "model.txt", m);

  std::size_t used = 0;
  for (const auto& s : samples) used += s.z_world >= fc.min_z_world;
  std::ostringstream r;
  r << "samples=" << samples.size() << "\nsamples_used=" << used << "\nmin_z_world=" << fmt(fc.min_z_world)
    << "\na=" << fmt(m.a()) << "\nb=" << fmt(m.b()) << "\nc=" << fmt(m.c()) << "\nd=" << fmt(m.d())
    << "\nr_squared=" << fmt(rep.stats.r_squared) << "\nrmse_cm=" << fmt(rep.stats.rmse)
    << "\nsse=" << fmt(rep.stats.sse) << "\niterations=" << rep.stats.iterations
    << "\nconverged=" << (rep.stats.converged ? "true" : "false") << "\nbest_family=" << family_name(ranked.front().family)
    << "\n";
  write_text(out / "fit_report.txt", r.str());

  std::ostringstream f;
  f << "rank,family,params,r_squared,rmse_cm,status\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& fr = ranked[i];
    std::string params;
    for (double p : fr.params) params += (params.empty() ? "" : " ") + fmt(p);
    f << i + 1 << "," << family_name(fr.family) << "," << params << ","
      << (fr.ok() ? fmt(fr.stats.r_squared) : "") << "," << (fr.ok() ? fmt(fr.stats.rmse) : "") << ","
      << (fr.ok() ? std::string("ok") : "failed: " + fr.failure) << "\n";
  }
  write_text(out / "families.csv", f.str());

  std::ostringstream res;
  res << "run_id,z_img,z_world_cm,predicted_cm,residual_cm,used\n";
  std::vector<double> xs, ys;
  for (const auto& s : samples) {
    const double p = m(s.z_img);
    res << s.run_id << "," << fmt(s.z_img) << "," << fmt(s.z_world) << "," << fmt(p) << "," << fmt(s.z_world - p)
        << "," << (s.z_world >= fc.min_z_world ? 1 : 0) << "\n";
    xs.push_back(s.z_img);
    ys.push_back(s.z_world);
  }
  write_text(out / "residuals.csv", res.str());

  const auto xr = plot::span_of(xs), yr = plot::span_of(ys);
  plot::Canvas c(480, 360, xr[0], xr[1], yr[0], yr[1]);
  for (std::size_t i = 0; i < xs.size(); ++i) c.dot(xs[i], ys[i], plot::kBlue);
  std::vector<double> cx, cy;
  for (int i = 0; i <= 400; ++i) {
    cx.push_back(xr[0] + (xr[1] - xr[0]) * i / 400.0);
    cy.push_back(m(cx.back()));
  }
  c.polyline(cx, cy, plot::kRed);
  c.hline(fc.min_z_world, plot::kGray);
  save_image(c.image(), out / "fit_plot.png");

  std::cout << "fit: a=" << fmt(m.a()) << " b=" << fmt(m.b()) << " c=" << fmt(m.c()) << " d=" << fmt(m.d())
            << " R2=" << fmt(rep.stats.r_squared) << " RMSE=" << fmt(rep.stats.rmse) << " cm\n";
}

// ---------------------------------------------------------------------------

struct CalibArgs {
  std::string manifest;
  bool csv = false;
};

void cmd_calibrate_tactile(const Globals& gl, const fs::path& out, const CalibArgs& a) {
  const fs::path manifest = resolve_input(a.manifest);
  const auto entries = tactile::read_press_manifest(manifest);
  const double pitch = gl.cfg.get_double("pixel_pitch", 0.04);
  const double r = gl.cfg.get_double("sphere_radius", 2.5);
  const double clamp = gl.cfg.get_double("clamp_fraction", 0.95);
  tactile::CircleDetectOptions det;
  det.threshold = gl.cfg.get_double("circle_threshold", det.threshold);

  // Each slot is filled independently, so the worker count cannot change the result.
  std::vector<std::optional<tactile::SpherePress>> slots(entries.size());
  std::vector<std::string> errors(entries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      try {
        const auto& e = entries[i];
        tactile::SpherePress p;
        p.image = load_image(e.image);
        p.reference = load_image(e.reference);
        require(p.image.same_shape(p.reference), ErrorKind::DimensionMismatch, "image and reference differ in shape");
        const tactile::ContactCircle c = e.known ? *e.known : tactile::detect_contact_circle(p.image, p.reference, det);
        p.center_u = c.center_u;
        p.center_v = c.center_v;
        p.r_star = c.radius * pitch;
        p.r = r;
        p.pixel_pitch = pitch;
        p.validate();
        slots[i] = std::move(p);
      } catch (const Error& err) {
        errors[i] = std::string("[") + std::string(to_string(err.kind())) + "] " + err.what();
      }
    }
  };
  const int jobs = std::max(1, gl.jobs);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<tactile::SpherePress> presses;
  std::ostringstream skipped;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (slots[i]) {
      presses.push_back(std::move(*slots[i]));
    } else {
      skipped << entries[i].image.generic_string() << ": " << errors[i] << "\n";
      std::cerr << "skipped " << entries[i].image.generic_string() << ": " << errors[i] << "\n";
    }
  }
  std::vector<std::string> late;
  const auto dataset = tactile::build_dataset(presses, clamp, &late);
  for (const auto& s : late) skipped << s << "\n";
  write_text(out / "skipped.txt", skipped.str());
  require(!dataset.empty(), ErrorKind::InsufficientSamples, "no usable presses in " + a.manifest);

  write_dataset_vtp1(out / "dataset.vtp", dataset);
  if (a.csv) write_dataset_csv(out / "dataset.csv", dataset);

  KeyValueConfig mc = gl.cfg;
  mc.set("seed", std::to_string(gl.seed));
  const auto cfg = mapper::MlpConfig::from_config(mc);
  const auto result = mapper::train(dataset, cfg, [](const mapper::EpochRecord& e) {
    std::cout << "epoch " << e.epoch << " train_l1=" << fmt(e.train_l1) << " val_l1=" << fmt(e.val_l1)
              << " val_mse=" << fmt(e.val_mse) << "\n";
  });
  mapper::write_weights(out / "weights.vtpw", result.weights);
  mapper::write_log_csv(out / "training_log.csv", result.log);

  const auto& log = result.log;
  std::ostringstream rep;
  rep << "presses_listed=" << entries.size() << "\npresses_used=" << presses.size() - late.size()
      << "\nsamples=" << dataset.size() << "\ntrain_size=" << log.train_size << "\nval_size=" << log.val_size
      << "\nepochs=" << log.epochs.size() << "\nbest_epoch=" << log.best_epoch << "\nbest_val_l1=" << fmt(log.best_val_l1)
      << "\nfinal_val_l1=" << fmt(log.final_val_l1) << "\nfinal_val_mse=" << fmt(log.final_val_mse)
      << "\noutput_refit=" << (log.output_refit ? "true" : "false") << "\nstopped_early=" << (log.stopped_early ? "true" : "false")
      << "\nparameters=" << result.weights.parameter_count() << "\nseed=" << gl.seed << "\n";
  write_text(out / "calibration_report.txt", rep.str());
  std::cout << "calibrated on " << dataset.size() << " samples, val MSE " << fmt(log.final_val_mse) << "\n";
}

// ---------------------------------------------------------------------------

struct ReconArgs {
  std::string image, reference, weights;
};

void cmd_reconstruct(const Globals& gl, const fs::path& out, const ReconArgs& a) {
  const RasterImage img = load_image(resolve_input(a.image));
  const RasterImage ref = load_image(resolve_input(a.reference));
  require(img.same_shape(ref), ErrorKind::DimensionMismatch,
          "image is " + std::to_string(img.width()) + "x" + std::to_string(img.height()) + "x" +
              std::to_string(img.channels()) + " but reference is " + std::to_string(ref.width()) + "x" +
              std::to_string(ref.height()) + "x" + std::to_string(ref.channels()));
  const auto weights = mapper::read_weights(resolve_input(a.weights));
  const double pitch = gl.cfg.get_double("pixel_pitch", 0.04);
  const double r = gl.cfg.get_double("sphere_radius", 2.5);
  const double clamp = gl.cfg.get_double("clamp_fraction", 0.95);
  const auto lap = parse_laplacian(gl.cfg.get_string("laplacian", "continuous"));
  const std::string domain = gl.cfg.get_string("domain", "disc");
  require(domain == "disc" || domain == "full", ErrorKind::InvalidArgument, "domain must be disc or full");
  tactile::CircleDetectOptions det;
  det.threshold = gl.cfg.get_double("circle_threshold", det.threshold);

  std::optional<tactile::ContactCircle> contact;
  try {
    contact = tactile::detect_contact_circle(img, ref, det);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientSupport) throw;
  }

  std::ostringstream rep;
  GradientField g(img.width(), img.height());
  HeightMap h(ScalarField(img.width(), img.height(), 0.0), pitch);
  double depth = 0.0;
  if (contact) {
    const SegMask disc = tactile::disc_mask(img.width(), img.height(), contact->center_u, contact->center_v,
                                            clamp * contact->radius);
    g = mapper::infer_gradients(weights, img, domain == "disc" ? &disc : nullptr);
    h = recon::reconstruct(g, pitch, lap);
    depth = tactile::estimate_press_depth(h, *contact, clamp, r);
    rep << "contact=detected\ncenter_u=" << fmt(contact->center_u) << "\ncenter_v=" << fmt(contact->center_v)
        << "\nradius_px=" << fmt(contact->radius) << "\nsupport_px=" << contact->support
        << "\nboundary_rms_px=" << fmt(contact->rms_residual) << "\n";
  } else {
    rep << "contact=none\n";
  }
  rep << "apex_depth_mm=" << fmt(depth) << "\npixel_pitch=" << fmt(pitch) << "\nlaplacian="
      << (lap == recon::Laplacian::Continuous ? "continuous" : "discrete") << "\ndomain=" << domain << "\n";
  write_height_outputs(out, h, g);
  write_text(out / "reconstruct_report.txt", rep.str());
  std::cout << (contact ? "contact detected" : "no contact") << ", apex depth " << fmt(depth) << " mm\n";
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::vector<std::string> images;
  std::string mode = "roughness";
  std::string reference;
};

ScalarField analysis_field(const RasterImage& img, const std::optional<RasterImage>& ref) {
  if (ref) {
    require(img.same_shape(*ref), ErrorKind::DimensionMismatch, "image and reference differ in shape");
    return to_field(difference_image(img, *ref));
  }
  return to_field(to_grayscale(img));
}

std::string stem_of(const std::string& p) { return fs::path(p).stem().string(); }

bool zero_variance(const ScalarField& f) {
  return std::all_of(f.values().begin(), f.values().end(), [&](double x) { return x == f[0]; });
}

void cmd_analyze(const Globals& gl, const fs::path& out, const AnalyzeArgs& a) {
  require(a.mode == "roughness" || a.mode == "texture", ErrorKind::InvalidArgument,
          "mode must be roughness or texture, got '" + a.mode + "'");
  std::optional<RasterImage> ref;
  if (!a.reference.empty()) ref = load_image(resolve_input(a.reference));
  std::vector<ScalarField> fields;
  for (const auto& p : a.images) fields.push_back(analysis_field(load_image(resolve_input(p)), ref));

  if (a.mode == "roughness") {
    const double cutoff = gl.cfg.get_double("cutoff_radius", 0.25);
    std::ostringstream csv;
    csv << "image,high_freq_ratio,cutoff_radius\n";
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto s = texture::amplitude_spectrum(fields[i], cutoff);
      save_image(field_to_gray(s.log_amplitude), out / ("spectrum_" + stem_of(a.images[i]) + ".png"));
      csv << a.images[i] << "," << fmt(s.high_freq_ratio) << "," << fmt(cutoff) << "\n";
      std::cout << a.images[i] << " high_freq_ratio=" << fmt(s.high_freq_ratio) << "\n";
    }
    write_text(out / "roughness.csv", csv.str());
    return;
  }

  texture::DiscriminateConfig dc;
  dc.wavelet_levels = static_cast<int>(gl.cfg.get_long("wavelet_levels", dc.wavelet_levels));
  dc.glcm_levels = static_cast<int>(gl.cfg.get_long("glcm_levels", dc.glcm_levels));
  dc.glcm_du = static_cast<int>(gl.cfg.get_long("glcm_du", dc.glcm_du));
  dc.glcm_dv = static_cast<int>(gl.cfg.get_long("glcm_dv", dc.glcm_dv));
  dc.tiles = static_cast<int>(gl.cfg.get_long("tiles", dc.tiles));

  std::ostringstream feats;
  feats << "image";
  for (const auto& n : texture::TextureFeatures::names(dc.wavelet_levels)) feats << "," << n;
  feats << "\n";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (zero_variance(fields[i])) std::cerr << "warning: " << a.images[i] << " has zero variance\n";
    feats << a.images[i];
    for (double v : texture::compute_features(fields[i], dc).flatten()) feats << "," << fmt(v);
    feats << "\n";
  }
  write_text(out / "features.csv", feats.str());

  std::ostringstream margins;
  margins << "image_a,image_b,feature,value_a,value_b,margin\n";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    for (std::size_t j = i + 1; j < fields.size(); ++j) {
      try {
        const auto rep = texture::discriminate(fields[i], fields[j], dc);
        for (const auto& f : rep.features)
          margins << a.images[i] << "," << a.images[j] << "," << f.name << "," << fmt(f.value_a) << ","
                  << fmt(f.value_b) << "," << fmt(f.margin) << "\n";
        std::cout << a.images[i] << " vs " << a.images[j] << ": best " << rep.best_feature << " margin "
                  << fmt(rep.best_margin) << "\n";
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Degenerate) throw;
        std::cerr << "warning: " << a.images[i] << " vs " << a.images[j] << ": " << e.what() << "\n";
      }
    }
  }
  write_text(out / "texture.csv", margins.str());
}

// ---------------------------------------------------------------------------

struct GraspArgs {
  std::string scenario, model, weights;
};

void cmd_simulate_grasp(const Globals& gl, const fs::path& out, const GraspArgs& a) {
  KeyValueConfig cfg = KeyValueConfig::load(resolve_input(a.scenario));
  merge_into(cfg, gl.cfg);
  cfg.set("seed", std::to_string(gl.seed));
  if (!cfg.contains("press_seed")) cfg.set("press_seed", std::to_string(gl.seed + 1));

  control::ScenarioConfig sc{scene::ApproachScenario::from_config(cfg), control::PressScript::from_config(cfg),
                             control::SwitchConfig::from_config(cfg)};
  const auto model = proximity::read_model(resolve_input(a.model));
  const auto weights = mapper::read_weights(resolve_input(a.weights));
  const auto rep = control::run_grasp_scenario(sc, model, weights);

  write_text(out / "commands.log", control::format_log(rep.commands));

  std::ostringstream frames;
  frames << "t,truth_cm,estimate_cm,mode\n";
  std::vector<double> ts, truth, et, est;
  for (const auto& f : rep.frames) {
    frames << fmt(f.t) << "," << fmt(f.truth_cm) << "," << (f.estimate_cm ? fmt(*f.estimate_cm) : "") << ","
           << control::mode_name(f.mode) << "\n";
    ts.push_back(f.t);
    truth.push_back(f.truth_cm);
    if (f.estimate_cm) {
      et.push_back(f.t);
      est.push_back(*f.estimate_cm);
    }
  }
  write_text(out / "frames.csv", frames.str());

  std::ostringstream track;
  track << "target_cm,frame,truth_cm,predicted_cm,abs_error_cm\n";
  for (const auto& c : rep.tracking.checkpoints)
    track << fmt(c.target_cm) << "," << c.estimate.frame << "," << fmt(c.estimate.truth_cm) << ","
          << fmt(c.estimate.predicted_cm) << "," << fmt(c.estimate.abs_error_cm) << "\n";
  write_text(out / "tracking.csv", track.str());

  auto opt = [](const std::optional<double>& x) { return x ? fmt(*x) : std::string("none"); };
  std::ostringstream r;
  r << "final_mode=" << control::mode_name(rep.final_mode) << "\nswitch_time_s=" << opt(rep.switch_time)
    << "\nswitch_measured_cm=" << opt(rep.switch_measured_cm) << "\nswitch_truth_cm=" << opt(rep.switch_truth_cm)
    << "\ncontact_time_s=" << opt(rep.contact_time) << "\ntracking_mae_cm=" << fmt(rep.tracking.mae_cm)
    << "\nranging_accuracy=" << fmt(rep.ranging_accuracy) << "\ncommands=" << rep.commands.size()
    << "\nreconstructed_depth_mm=" << fmt(rep.reconstructed_depth) << "\nscripted_depth_mm=" << fmt(sc.press.depth)
    << "\nspeed_cmps=" << fmt(sc.approach.speed) << "\nnoise_sigma=" << fmt(sc.approach.noise_sigma)
    << "\nseed=" << gl.seed << "\n";
  write_text(out / "scenario_report.txt", r.str());

  std::vector<double> ys = truth;
  ys.insert(ys.end(), est.begin(), est.end());
  const auto xr = plot::span_of(ts), yr = plot::span_of(ys);
  plot::Canvas c(640, 360, xr[0], xr[1], yr[0], yr[1]);
  c.hline(sc.control.distance_threshold, plot::kGray);
  c.polyline(ts, truth, plot::kBlack);
  for (std::size_t i = 0; i < et.size(); ++i) c.dot(et[i], est[i], plot::kBlue);
  if (rep.switch_time) c.vline(*rep.switch_time, plot::kRed);
  if (rep.contact_time) c.vline(*rep.contact_time, plot::kGreen);
  save_image(c.image(), out / "distance_plot.png");

  if (rep.reconstruction) {
    const auto& h = *rep.reconstruction;
    GradientField g(h.width(), h.height());
    for (std::size_t v = 0; v < h.height(); ++v)
      for (std::size_t u = 1; u + 1 < h.width(); ++u) g.gu(u, v) = (h.z(u + 1, v) - h.z(u - 1, v)) / (2 * h.pixel_pitch);
    for (std::size_t v = 1; v + 1 < h.height(); ++v)
      for (std::size_t u = 0; u < h.width(); ++u) g.gv(u, v) = (h.z(u, v + 1) - h.z(u, v - 1)) / (2 * h.pixel_pitch);
    write_height_outputs(out, h, g);
  }
  std::cout << "final mode " << control::mode_name(rep.final_mode) << ", switch at " << opt(rep.switch_time)
            << " s, ranging accuracy " << fmt(rep.ranging_accuracy) << "\n";
}

// ---------------------------------------------------------------------------

struct RenderArgs {
  // press
  double depth = 0.8;
  std::optional<double> center_u, center_v;
  // presses
  std::size_t count = 30;
  double depth_min = 0.4, depth_max = 1.0;
  // rough
  std::vector<double> meshes{150, 280, 500};
  std::size_t size = 256;
  // approach
  std::optional<double> speed;
  // samples
  std::optional<double> noise_cm;
};

struct TactileGeometry {
  std::size_t width, height;
  double pitch, r;
  tactile::LightingRig rig;

  static TactileGeometry from(const KeyValueConfig& cfg) {
    return {static_cast<std::size_t>(cfg.get_long("tactile_width", 256)),
            static_cast<std::size_t>(cfg.get_long("tactile_height", 192)), cfg.get_double("pixel_pitch", 0.04),
            cfg.get_double("sphere_radius", 2.5), tactile::LightingRig::from_config(cfg)};
  }
  KeyValueConfig sidecar(std::uint64_t seed) const {
    KeyValueConfig kv = rig.to_config();
    kv.set("tactile_width", std::to_string(width));
    kv.set("tactile_height", std::to_string(height));
    kv.set("pixel_pitch", fmt(pitch));
    kv.set("sphere_radius", fmt(r));
    kv.set("seed", std::to_string(seed));
    return kv;
  }
};

void render_press(const Globals& gl, const fs::path& out, const RenderArgs& a) {
  const auto geo = TactileGeometry::from(gl.cfg);
  const double cu = a.center_u.value_or(0.5 * static_cast<double>(geo.width));
  const double cv = a.center_v.value_or(0.5 * static_cast<double>(geo.height));
  const auto press = tactile::make_height_sphere_press(geo.r, a.depth, cu, cv, geo.width, geo.height, geo.pitch);
  const auto flat = tactile::make_height_sphere_press(geo.r, 0.0, cu, cv, geo.width, geo.height, geo.pitch);
  save_image(tactile::render(press.height, geo.rig, gl.seed), out / "press.png");
  save_image(tactile::render(flat.height, geo.rig, gl.seed + 1), out / "reference.png");
  write_vtp1(out / "height_truth.vtp", to_planes(press.height));
  auto kv = geo.sidecar(gl.seed);
  kv.set("depth", fmt(a.depth));
  kv.set("center_u", fmt(cu));
  kv.set("center_v", fmt(cv));
  kv.set("r_star_mm", fmt(press.r_star));
  kv.set("r_star_px", fmt(press.r_star / geo.pitch));
  tactile::write_sidecar(out / "press.txt", kv);
}

void render_presses(const Globals& gl, const fs::path& out, const RenderArgs& a) {
  require(a.count > 0, ErrorKind::InvalidArgument, "count must be > 0");
  require(0.0 < a.depth_min && a.depth_min <= a.depth_max, ErrorKind::InvalidArgument, "bad depth range");
  const auto geo = TactileGeometry::from(gl.cfg);
  const double margin = geo.r / geo.pitch;  // keep the full contact disc in frame
  require(2.0 * margin < static_cast<double>(std::min(geo.width, geo.height)), ErrorKind::InvalidArgument,
          "frame too small for the sphere");
  fs::create_directories(out / "presses");
  Rng rng(gl.seed);
  const auto flat = tactile::make_height_sphere_press(geo.r, 0.0, 0.0, 0.0, geo.width, geo.height, geo.pitch);
  std::vector<tactile::PressManifestEntry> entries;
  std::ostringstream truth;
  truth << "image,depth_mm,center_u,center_v,r_star_mm\n";
  for (std::size_t k = 0; k < a.count; ++k) {
    const double d = rng.uniform(a.depth_min, a.depth_max);
    const double cu = rng.uniform(margin, static_cast<double>(geo.width) - margin);
    const double cv = rng.uniform(margin, static_cast<double>(geo.height) - margin);
    const auto g = tactile::make_height_sphere_press(geo.r, d, cu, cv, geo.width, geo.height, geo.pitch);
    char name[64], refname[64];
    std::snprintf(name, sizeof name, "press_%03zu.png", k);
    std::snprintf(refname, sizeof refname, "reference_%03zu.png", k);
    save_image(tactile::render(g.height, geo.rig, rng.below(1ull << 62)), out / "presses" / name);
    save_image(tactile::render(flat.height, geo.rig, rng.below(1ull << 62)), out / "presses" / refname);
    tactile::ContactCircle known;
    known.center_u = cu;
    known.center_v = cv;
    known.radius = g.r_star / geo.pitch;
    entries.push_back({fs::path("presses") / name, fs::path("presses") / refname, known});
    truth << "presses/" << name << "," << fmt(d) << "," << fmt(cu) << "," << fmt(cv) << "," << fmt(g.r_star) << "\n";
  }
  tactile::write_press_manifest(out / "manifest.csv", entries);
  write_text(out / "presses_truth.csv", truth.str());
  auto kv = geo.sidecar(gl.seed);
  kv.set("count", std::to_string(a.count));
  kv.set("depth_min", fmt(a.depth_min));
  kv.set("depth_max", fmt(a.depth_max));
  tactile::write_sidecar(out / "presses.txt", kv);
}

void render_rough(const Globals& gl, const fs::path& out, const RenderArgs& a) {
  require(!a.meshes.empty(), ErrorKind::InvalidArgument, "no mesh counts given");
  const double pitch = gl.cfg.get_double("rough_pitch", 0.01);
  const auto rig = tactile::LightingRig::from_config(gl.cfg);
  const HeightMap flat(ScalarField(a.size, a.size, 0.0), pitch);
  save_image(tactile::render(flat, rig, gl.seed), out / "reference.png");
  KeyValueConfig kv = rig.to_config();
  kv.set("size", std::to_string(a.size));
  kv.set("rough_pitch", fmt(pitch));
  kv.set("seed", std::to_string(gl.seed));
  for (std::size_t i = 0; i < a.meshes.size(); ++i) {
    require(a.meshes[i] > 0.0, ErrorKind::InvalidArgument, "mesh counts must be > 0");
    const auto e = texture::emulate_mesh(a.meshes[i]);
    const auto h = tactile::make_height_rough(e.grit_scale, e.amplitude, a.size, a.size, pitch, gl.seed + 100 + i);
    const std::string tag = "rough_" + fmt(a.meshes[i]);
    save_image(tactile::render(h, rig, gl.seed + 200 + i), out / (tag + ".png"));
    kv.set(tag + "_grit_mm", fmt(e.grit_scale));
    kv.set(tag + "_rms_mm", fmt(e.amplitude));
  }
  tactile::write_sidecar(out / "rough.txt", kv);
}

void render_approach(const Globals& gl, const fs::path& out, const RenderArgs& a) {
  KeyValueConfig cfg = gl.cfg;
  cfg.set("seed", std::to_string(gl.seed));
  if (a.speed) cfg.set("speed", fmt(*a.speed));
  const auto s = scene::ApproachScenario::from_config(cfg);
  scene::write_sequence(out / "approach", scene::generate_sequence(s));
  KeyValueConfig kv;
  kv.set("speed", fmt(s.speed));
  kv.set("start_distance", fmt(s.start_distance));
  kv.set("end_distance", fmt(s.end_distance));
  kv.set("frame_rate", fmt(s.frame_rate));
  kv.set("target_size", fmt(s.target_size));
  kv.set("noise_sigma", fmt(s.noise_sigma));
  kv.set("width", std::to_string(s.width));
  kv.set("height", std::to_string(s.height));
  kv.set("seed", std::to_string(s.seed));
  tactile::write_sidecar(out / "approach.txt", kv);
}

void render_samples(const Globals& gl, const fs::path& out, const RenderArgs& a) {
  scene::CalibrationRuns c;
  c.seed = gl.seed;
  c.runs = static_cast<std::size_t>(gl.cfg.get_long("runs", static_cast<long>(c.runs)));
  c.min_cm = gl.cfg.get_double("min_cm", c.min_cm);
  c.max_cm = gl.cfg.get_double("max_cm", c.max_cm);
  c.step_cm = gl.cfg.get_double("step_cm", c.step_cm);
  c.noise_cm = a.noise_cm.value_or(gl.cfg.get_double("noise_cm", c.noise_cm));
  proximity::write_samples_csv(out / "samples.csv", scene::synthesize_calibration_runs(c));
  KeyValueConfig kv;
  kv.set("runs", std::to_string(c.runs));
  kv.set("min_cm", fmt(c.min_cm));
  kv.set("max_cm", fmt(c.max_cm));
  kv.set("step_cm", fmt(c.step_cm));
  kv.set("noise_cm", fmt(c.noise_cm));
  kv.set("seed", std::to_string(c.seed));
  tactile::write_sidecar(out / "samples.txt", kv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vtpalm: proximity-tactile palm sensor toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals gl;
  auto* seed_opt = app.add_option("--seed", gl.seed, "random seed (default 42, or 'seed' from --config)");
  app.add_option("--jobs", gl.jobs, "worker threads for parallel stages")->check(CLI::PositiveNumber);
  app.add_option("--out", gl.out, "output directory (default $VTPALM_DATA_DIR/out or ./out)");
  app.add_option("--config", gl.config, "key=value configuration file");
  app.add_option("--set", gl.sets, "override a configuration key (key=value)");

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit-proximity", "fit the depth-to-distance model");
  c_fit->add_option("samples", fit.samples, "calibration samples CSV")->required();
  c_fit->add_option("--min-z-world", fit.min_z_world, "exclude samples closer than this (cm)");

  CalibArgs cal;
  auto* c_cal = app.add_subcommand("calibrate-tactile", "build the gradient dataset and train the mapper");
  c_cal->add_option("manifest", cal.manifest, "press manifest CSV")->required();
  c_cal->add_flag("--csv", cal.csv, "also write the dataset as CSV");

  ReconArgs rec;
  auto* c_rec = app.add_subcommand("reconstruct", "reconstruct a height map from one tactile frame");
  c_rec->add_option("image", rec.image)->required();
  c_rec->add_option("reference", rec.reference)->required();
  c_rec->add_option("weights", rec.weights)->required();

  AnalyzeArgs an;
  auto* c_an = app.add_subcommand("analyze", "roughness spectra or texture discrimination");
  c_an->add_option("images", an.images)->required();
  c_an->add_option("--mode", an.mode)->check(CLI::IsMember({"roughness", "texture"}));
  c_an->add_option("--reference", an.reference, "subtract this no-contact frame first");

  GraspArgs gr;
  auto* c_gr = app.add_subcommand("simulate-grasp", "run the approach, switch and grasp scenario");
  c_gr->add_option("scenario", gr.scenario)->required();
  c_gr->add_option("model", gr.model)->required();
  c_gr->add_option("weights", gr.weights)->required();

  RenderArgs ra;
  auto* c_render = app.add_subcommand("render", "synthetic data generators");
  c_render->require_subcommand(1);
  auto* r_press = c_render->add_subcommand("press", "one sphere press and its reference");
  r_press->add_option("--depth", ra.depth);
  r_press->add_option("--center-u", ra.center_u);
  r_press->add_option("--center-v", ra.center_v);
  auto* r_presses = c_render->add_subcommand("presses", "calibration press set with manifest");
  r_presses->add_option("--count", ra.count);
  r_presses->add_option("--depth-min", ra.depth_min);
  r_presses->add_option("--depth-max", ra.depth_max);
  auto* r_rough = c_render->add_subcommand("rough", "abrasive-paper surfaces by mesh count");
  r_rough->add_option("--mesh", ra.meshes);
  r_rough->add_option("--size", ra.size);
  auto* r_approach = c_render->add_subcommand("approach", "depth/mask sequence of an approaching target");
  r_approach->add_option("--speed", ra.speed);
  auto* r_samples = c_render->add_subcommand("samples", "proximity calibration samples CSV");
  r_samples->add_option("--noise-cm", ra.noise_cm);

  CLI11_PARSE(app, argc, argv);

  std::string command;
  for (const auto* sub : app.get_subcommands()) {
    command = sub->get_name();
    for (const auto* inner : sub->get_subcommands()) command += " " + inner->get_name();
  }

  try {
    if (!gl.config.empty()) gl.cfg = KeyValueConfig::load(resolve_input(gl.config));
    for (const auto& s : gl.sets) {
      const auto eq = s.find('=');
      require(eq != std::string::npos && eq > 0, ErrorKind::InvalidArgument, "--set expects key=value, got '" + s + "'");
      gl.cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    gl.seed_given = seed_opt->count() > 0;
    if (!gl.seed_given) gl.seed = static_cast<std::uint64_t>(gl.cfg.get_long("seed", 42));

    const fs::path out = gl.out.empty() ? default_out() : fs::path(gl.out);
    fs::create_directories(out);

    if (c_fit->parsed()) cmd_fit_proximity(gl, out, fit);
    else if (c_cal->parsed()) cmd_calibrate_tactile(gl, out, cal);
    else if (c_rec->parsed()) cmd_reconstruct(gl, out, rec);
    else if (c_an->parsed()) cmd_analyze(gl, out, an);
    else if (c_gr->parsed()) cmd_simulate_grasp(gl, out, gr);
    else if (r_press->parsed()) render_press(gl, out, ra);
    else if (r_presses->parsed()) render_presses(gl, out, ra);
    else if (r_rough->parsed()) render_rough(gl, out, ra);
    else if (r_approach->parsed()) render_approach(gl, out, ra);
    else if (r_samples->parsed()) render_samples(gl, out, ra);

    write_manifest(out, command, gl.seed);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
