#pragma once

#include <png.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "zeroline/evaluate.hpp"
#include "zeroline/image_ops.hpp"
#include "zeroline/session.hpp"
#include "zeroline/synthgen.hpp"

namespace zeroline::cli {

namespace fs = std::filesystem;

enum ExitStatus : int {
  kOk = 0,
  kOther = 1,
  kSegmentation = 2,
  kValidation = 3,
  kIo = 4,
};

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSegmentationFailure:
    case ErrorCode::kImageTooSmall:
    case ErrorCode::kTooFewMatches:
    case ErrorCode::kNoConsensus:
    case ErrorCode::kNoCandidateRegion:
      return kSegmentation;
    case ErrorCode::kMalformedHeader:
    case ErrorCode::kUnsupportedMaxval:
    case ErrorCode::kTruncatedRaster:
    case ErrorCode::kSchemaViolation:
    case ErrorCode::kFrameMismatch:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kNonPositiveDistance:
    case ErrorCode::kSizeTooSmall:
    case ErrorCode::kEmptyDataset:
    case ErrorCode::kEmptyGroup:
      return kValidation;
    case ErrorCode::kNotFound:
    case ErrorCode::kIoFailure:
      return kIo;
    default:
      return kOther;
  }
}

// ---------------------------------------------------------------------------
// Input helpers

inline bool has_png_signature(const std::vector<std::uint8_t>& bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

/// PNG decoded straight to gray with BT.601 luma.
inline GrayImage decode_png(const std::vector<std::uint8_t>& bytes) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::kMalformedHeader, std::string("png: ") + img.message);
  }
  img.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, rgb.data(), 0, nullptr)) {
    png_image_free(&img);
    throw Error(ErrorCode::kTruncatedRaster, std::string("png: ") + img.message);
  }
  const int w = static_cast<int>(img.width), h = static_cast<int>(img.height);
  std::vector<std::uint8_t> gray(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = luma_bt601(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
  return GrayImage(w, h, std::move(gray));
}

inline GrayImage load_image(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  return has_png_signature(bytes) ? decode_png(bytes) : decode_pgm(bytes);
}

inline nlohmann::json load_json(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  auto j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kSchemaViolation, path.string() + ": not valid JSON");
  return j;
}

inline void write_text(const fs::path& path, const std::string& text) {
  write_file_atomic(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

/// Template image plus optional sidecar `<name>.json` with mm_per_pixel and
/// aim_point.
inline TargetTemplate load_template(const fs::path& path) {
  GrayImage img = load_image(path);
  double mm = 0.5;
  std::optional<Point2> aim;
  fs::path meta = path;
  meta.replace_extension(".json");
  if (fs::exists(meta)) {
    const auto j = load_json(meta);
    try {
      mm = j.value("mm_per_pixel", mm);
      if (j.contains("aim_point")) aim = detail::point_from(j["aim_point"]);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kSchemaViolation, meta.string() + ": " + e.what());
    }
  }
  return make_template(std::move(img), mm, aim);
}

/// "lo:step:hi" or a comma list.
inline std::vector<double> parse_thresholds(const std::string& text) {
  std::vector<double> out;
  auto num = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw Error(ErrorCode::kInvalidArgument, "bad threshold '" + s + "'");
    return v;
  };
  if (std::count(text.begin(), text.end(), ':') == 2) {
    const auto a = text.find(':'), b = text.rfind(':');
    const double lo = num(text.substr(0, a)), step = num(text.substr(a + 1, b - a - 1)), hi = num(text.substr(b + 1));
    if (!(step > 0.0) || hi < lo) throw Error(ErrorCode::kInvalidArgument, "bad threshold range '" + text + "'");
    const long n = std::lround((hi - lo) / step);
    for (long i = 0; i <= n; ++i) out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9);
  } else {
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) out.push_back(num(part));
  }
  for (double t : out) {
    if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::kInvalidArgument, "thresholds must lie in (0, 1)");
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "no thresholds");
  return out;
}

inline std::string fixed(double v, int digits = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline void print_group(std::ostream& out, const GroupStats& g, const Adjustment& a) {
  out << "group center (px): " << fixed(g.center_px.x, 2) << " " << fixed(g.center_px.y, 2) << "\n"
      << "group center (mm): " << fixed(g.center_mm.x, 2) << " " << fixed(g.center_mm.y, 2) << "\n"
      << "holes in group: " << g.count << "\n"
      << "extreme spread (mm): " << fixed(g.extreme_spread_mm, 2) << "\n"
      << "mean radius (mm): " << fixed(g.mean_radius_mm, 2) << "\n"
      << "windage clicks: " << a.windage_clicks << (a.windage_clicks >= 0 ? " (right)" : " (left)") << "\n"
      << "elevation clicks: " << a.elevation_clicks << (a.elevation_clicks >= 0 ? " (up)" : " (down)") << "\n"
      << "residual (mm): " << fixed(a.residual_x_mm) << " " << fixed(a.residual_y_mm) << "\n";
}

// ---------------------------------------------------------------------------
// Commands

struct SynthOptions {
  std::uint64_t seed = 1;
  int sequences = 1;
  int iters = 2;
  int holes_min = 3;
  int holes_max = 4;
  double perspective = 0.08;
  double noise = 4.0;
  double offset_x_mm = 0.0;
  double offset_y_mm = 0.0;
  int size = 800;
  double mm_per_pixel = 0.5;
  std::string out;
};

inline std::string sequence_dir_name(int i) {
  std::ostringstream os;
  os << "seq_" << std::setw(4) << std::setfill('0') << i;
  return os.str();
}

inline int cmd_synth(const SynthOptions& o, std::ostream& out) {
  if (o.sequences < 1) throw Error(ErrorCode::kInvalidConfig, "--sequences must be >= 1");
  SequenceSpec base;
  base.iterations = o.iters;
  base.holes_min = o.holes_min;
  base.holes_max = o.holes_max;
  base.perspective_magnitude = o.perspective;
  base.noise_sigma = o.noise;
  base.group_offset_x_mm = o.offset_x_mm;
  base.group_offset_y_mm = o.offset_y_mm;
  validate(base);

  const TargetTemplate tmpl = render_template(o.size, o.mm_per_pixel);
  const fs::path root(o.out);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, root.string() + ": " + ec.message());
  save_pgm(tmpl.image, root / "template.pgm");
  write_text(root / "template.json", nlohmann::json{{"canonical_size", tmpl.canonical_size},
                                                    {"mm_per_pixel", tmpl.mm_per_pixel},
                                                    {"aim_point", detail::point_json(tmpl.aim_point)}}
                                             .dump(2) + "\n");

  for (int i = 0; i < o.sequences; ++i) {
    SequenceSpec spec = base;
    spec.seed = o.seed + static_cast<std::uint64_t>(i);
    Sequence seq = generate_sequence(spec, tmpl);
    seq.truth.template_ref = "../template.pgm";
    const fs::path dir = root / sequence_dir_name(i);
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::kIoFailure, dir.string() + ": " + ec.message());
    for (std::size_t k = 0; k < seq.images.size(); ++k) save_pgm(seq.images[k], dir / seq.truth.image_refs[k]);
    write_text(dir / "truth.json", to_json(seq.truth).dump(2) + "\n");
  }
  out << "wrote " << o.sequences << " sequence(s) to " << root.string() << "\n";
  return kOk;
}

struct TrackOptions {
  std::string session;
  std::string image;
  std::string templ;
  std::string detections;
  double threshold = kDefaultMatchThreshold;
  std::string annotate;
  bool create = false;
  std::string session_id;
  double distance_m = 25.0;
  double windage_moa = 0.5;
  double elevation_moa = 0.5;
  bool json = false;
};

inline int cmd_track(const TrackOptions& o, std::ostream& out) {
  const TargetTemplate tmpl = load_template(o.templ);
  Session session;
  if (o.create) {
    if (fs::exists(o.session)) throw Error(ErrorCode::kInvalidArgument, o.session + " already exists");
    SessionConfig c;
    c.session_id = o.session_id.empty() ? fs::path(o.session).stem().string() : o.session_id;
    c.template_ref = o.templ;
    c.distance_m = o.distance_m;
    c.mm_per_pixel = tmpl.mm_per_pixel;
    c.clicks = {o.windage_moa, o.elevation_moa};
    c.aim_point = tmpl.aim_point;
    c.match_threshold = o.threshold;
    validate(c);
    session.config = c;
  } else {
    session = load_session(o.session);
    if (!(o.threshold > 0.0 && o.threshold <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "--threshold must be in (0, 1]");
    session.config.match_threshold = o.threshold;
  }

  DetectorChoice detector = BuiltinDetector{};
  if (!o.detections.empty()) detector = ExternalDetections{load_json(o.detections)};
  const GrayImage raw = load_image(o.image);

  const AppendResult res = append_iteration(session, o.session, raw, o.image, tmpl, detector);
  const auto& it = res.iteration;

  if (!o.annotate.empty()) {
    std::vector<LabeledBox> boxes;
    std::vector<bool> is_new(it.record.detections.size(), false);
    for (std::size_t k : it.record.new_hole_indices) is_new[k] = true;
    for (std::size_t i = 0; i < it.record.detections.size(); ++i) {
      boxes.push_back({it.record.detections[i].bbox, is_new[i] ? BoxLabel::kNewHole : BoxLabel::kPriorHole});
    }
    const GrayImage canonical = warp_perspective(raw, it.homography, tmpl.canonical_size, tmpl.canonical_size);
    save_pgm(annotate(canonical, boxes), o.annotate);
  }

  if (o.json) {
    out << to_json(res.session)["iterations"].back().dump(2) << "\n";
    return kOk;
  }
  out << "iteration: " << it.record.index << "\n"
      << "new holes: " << it.record.new_hole_indices.size() << "\n"
      << "total holes: " << it.record.detections.size() << "\n"
      << "inliers: " << it.inlier_count << "\n"
      << "used fallback: " << (it.used_fallback ? "yes" : "no") << "\n";
  if (it.group) print_group(out, *it.group, *it.adjustment);
  return kOk;
}

struct EvalOptions {
  std::string pred;
  std::string truth;
  std::string report;
  std::string thresholds = "0.5:0.05:0.95";
};

/// Sequence directories (those holding truth.json) in name order.
inline std::vector<std::string> sequence_names(const fs::path& root, const char* marker_a, const char* marker_b = nullptr) {
  if (!fs::is_directory(root)) throw Error(ErrorCode::kNotFound, root.string() + ": not a directory");
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(root)) {
    if (!e.is_directory()) continue;
    if (fs::exists(e.path() / marker_a) || (marker_b && fs::exists(e.path() / marker_b))) {
      names.push_back(e.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

inline int cmd_eval(const EvalOptions& o, std::ostream& out) {
  const auto thresholds = parse_thresholds(o.thresholds);
  const auto truth_names = sequence_names(o.truth, "truth.json");
  const auto pred_names = sequence_names(o.pred, "session.json", "truth.json");
  if (pred_names.empty()) throw Error(ErrorCode::kSchemaViolation, o.pred + ": no predicted sequences");
  if (truth_names != pred_names) throw Error(ErrorCode::kSchemaViolation, "prediction and truth directories differ");

  std::vector<EvalCase> cases;
  for (const auto& name : truth_names) {
    EvalCase c;
    c.truth = ground_truth_from_json(load_json(fs::path(o.truth) / name / "truth.json"));
    const fs::path pdir = fs::path(o.pred) / name;
    if (fs::exists(pdir / "session.json")) {
      c.predicted = predictions_from_session(load_session(pdir / "session.json"), c.truth);
    } else {
      c.predicted = predictions_from_truth(ground_truth_from_json(load_json(pdir / "truth.json")));
    }
    cases.push_back(std::move(c));
  }
  const EvalReport r = evaluate(cases, thresholds);
  write_text(o.report, to_json(r).dump(2) + "\n");

  out << "metric                             value\n"
      << "mAP50 (bullet holes)               " << fixed(r.map50, 4) << "\n"
      << "mAP50-95 (bullet holes)            " << fixed(r.map50_95, 4) << "\n"
      << "new-hole Jaccard (mean)            " << fixed(r.jaccard_mean, 4) << "\n"
      << "iteration classification accuracy  " << fixed(r.iteration_classification_accuracy, 4) << "\n"
      << "segmentation accuracy              " << fixed(r.segmentation_accuracy, 4) << "\n"
      << "full pipeline accuracy             " << fixed(r.full_pipeline_accuracy, 4) << "\n"
      << "images " << r.counts.images << ", targets " << r.counts.targets << ", holes " << r.counts.holes << "\n";
  return kOk;
}

struct SegmentOptions {
  std::string image;
  std::string templ;
  std::string out;
  bool json = false;
};

inline int cmd_segment(const SegmentOptions& o, std::ostream& out) {
  const TargetTemplate tmpl = load_template(o.templ);
  const NormalizedTarget n = segment(load_image(o.image), tmpl);
  save_pgm(n.image, o.out);
  fs::path sidecar = o.out;
  sidecar.replace_extension(".json");
  const nlohmann::json meta{{"homography", n.homography_raw_to_canonical.to_array()},
                            {"inlier_count", n.inlier_count},
                            {"used_fallback", n.used_fallback}};
  write_text(sidecar, meta.dump(2) + "\n");
  if (o.json) {
    out << meta.dump(2) << "\n";
  } else {
    out << "inliers: " << n.inlier_count << "\n"
        << "used fallback: " << (n.used_fallback ? "yes" : "no") << "\n"
        << "wrote " << o.out << "\n";
  }
  return kOk;
}

struct DetectOptions {
  std::string image;
  std::string templ;
  std::string out;
  bool json = false;
};

/// Detects holes in a canonical image, or in a raw image registered first
/// when a template is given.
inline int cmd_detect(const DetectOptions& o, std::ostream& out) {
  const GrayImage img = load_image(o.image);
  DetectionFile f;
  f.image = o.image;
  f.frame = Frame::kNormalized;
  f.detections = o.templ.empty() ? detect_holes(img) : detect_holes(segment(img, load_template(o.templ)));
  const std::string text = to_json(f).dump(2) + "\n";
  if (!o.out.empty()) write_text(o.out, text);
  if (o.json) {
    out << text;
  } else {
    out << "holes: " << f.detections.size() << "\n";
  }
  return kOk;
}

struct ScoreOptions {
  std::string session;
  int iteration = 0;
  std::string detections;
  double mm_per_pixel = 0.5;
  double distance_m = 25.0;
  std::vector<double> aim;
  double windage_moa = 0.5;
  double elevation_moa = 0.5;
  bool json = false;
};

inline int cmd_score(const ScoreOptions& o, std::ostream& out) {
  GroupStats g;
  Adjustment a;
  if (!o.session.empty()) {
    const Session s = load_session(o.session);
    if (s.iterations.empty()) throw Error(ErrorCode::kInvalidArgument, "session has no iterations");
    const int k = o.iteration == 0 ? static_cast<int>(s.iterations.size()) : o.iteration;
    if (k < 1 || k > static_cast<int>(s.iterations.size())) throw Error(ErrorCode::kInvalidArgument, "no such iteration");
    const auto& it = s.iterations[static_cast<std::size_t>(k - 1)];
    if (!it.group) throw Error(ErrorCode::kEmptyGroup, "iteration " + std::to_string(k) + " has no new holes");
    g = *it.group;
    a = *it.adjustment;
  } else {
    if (o.detections.empty()) throw Error(ErrorCode::kInvalidArgument, "need --session or --detections");
    std::vector<Detection> holes;
    for (const auto& d : load_detections(load_json(o.detections))) {
      if (d.cls == DetectionClass::kBulletHole) holes.push_back(d);
    }
    g = group_stats(holes, o.mm_per_pixel);
    if (o.aim.size() != 2) throw Error(ErrorCode::kInvalidArgument, "--aim needs x,y");
    a = sight_adjustment(g.center_px, {o.aim[0], o.aim[1]}, o.mm_per_pixel, o.distance_m, {o.windage_moa, o.elevation_moa});
  }
  if (o.json) {
    out << nlohmann::json{{"group_stats", to_json(g)}, {"adjustment", to_json(a)}}.dump(2) << "\n";
  } else {
    print_group(out, g, a);
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// Entry point

/// Parses `args` (without the program name) and runs one subcommand.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rifle target registration, hole tracking and scoring", "zeroline"};
  app.require_subcommand(1);

  SynthOptions so;
  auto* synth = app.add_subcommand("synth", "Generate synthetic firing sequences with ground truth");
  synth->add_option("--seed", so.seed, "Base seed");
  synth->add_option("--sequences", so.sequences, "Number of sequences");
  synth->add_option("--iters", so.iters, "Firing iterations per sequence");
  synth->add_option("--holes-min", so.holes_min, "Fewest holes per iteration");
  synth->add_option("--holes-max", so.holes_max, "Most holes per iteration");
  synth->add_option("--perspective", so.perspective, "Corner jitter as a fraction of target size");
  synth->add_option("--noise", so.noise, "Pixel noise standard deviation");
  synth->add_option("--offset-x-mm", so.offset_x_mm, "Group offset right of aim");
  synth->add_option("--offset-y-mm", so.offset_y_mm, "Group offset below aim");
  synth->add_option("--out", so.out, "Output directory")->required();

  TrackOptions to;
  auto* track = app.add_subcommand("track", "Append one firing iteration to a session");
  track->add_option("--session", to.session, "Session JSON")->required();
  track->add_option("--image", to.image, "Raw target photo (PGM or PNG)")->required();
  track->add_option("--template", to.templ, "Template image")->required();
  track->add_option("--detections", to.detections, "External Detection-File instead of the built-in detector");
  track->add_option("--threshold", to.threshold, "IoU needed to call a hole a repeat");
  track->add_option("--annotate", to.annotate, "Write annotated canonical image");
  track->add_flag("--new", to.create, "Create the session");
  track->add_option("--session-id", to.session_id, "Session id for --new");
  track->add_option("--distance", to.distance_m, "Distance to target in metres (with --new)");
  track->add_option("--windage-moa", to.windage_moa, "MOA per windage click (with --new)");
  track->add_option("--elevation-moa", to.elevation_moa, "MOA per elevation click (with --new)");
  track->add_flag("--json", to.json, "Print the iteration record as JSON");

  EvalOptions eo;
  auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
  eval->add_option("--pred", eo.pred, "Directory of predicted sequences")->required();
  eval->add_option("--truth", eo.truth, "Directory of truth sequences")->required();
  eval->add_option("--report", eo.report, "Report JSON path")->required();
  eval->add_option("--thresholds", eo.thresholds, "IoU thresholds as lo:step:hi or a comma list");

  SegmentOptions sego;
  auto* seg = app.add_subcommand("segment", "Register a raw photo to the canonical frame");
  seg->add_option("--image", sego.image, "Raw target photo")->required();
  seg->add_option("--template", sego.templ, "Template image")->required();
  seg->add_option("--out", sego.out, "Warped PGM; sidecar JSON written next to it")->required();
  seg->add_flag("--json", sego.json, "Print the sidecar as JSON");

  DetectOptions dopt;
  auto* det = app.add_subcommand("detect", "Detect bullet holes");
  det->add_option("--image", dopt.image, "Canonical image, or raw photo with --template")->required();
  det->add_option("--template", dopt.templ, "Register the image first");
  det->add_option("--out", dopt.out, "Detection-File output");
  det->add_flag("--json", dopt.json, "Print the Detection-File");

  ScoreOptions sco;
  auto* score = app.add_subcommand("score", "Group statistics and sight adjustment");
  score->add_option("--session", sco.session, "Session JSON");
  score->add_option("--iteration", sco.iteration, "Iteration to score (default last)");
  score->add_option("--detections", sco.detections, "Canonical Detection-File instead of a session");
  score->add_option("--mm-per-pixel", sco.mm_per_pixel, "Scale for --detections");
  score->add_option("--distance", sco.distance_m, "Distance in metres for --detections");
  score->add_option("--aim", sco.aim, "Aim point x,y for --detections")->delimiter(',')->expected(2);
  score->add_option("--windage-moa", sco.windage_moa, "MOA per windage click");
  score->add_option("--elevation-moa", sco.elevation_moa, "MOA per elevation click");
  score->add_flag("--json", sco.json, "Print JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kValidation;
  }

  try {
    if (*synth) return cmd_synth(so, out);
    if (*track) return cmd_track(to, out);
    if (*eval) return cmd_eval(eo, out);
    if (*seg) return cmd_segment(sego, out);
    if (*det) return cmd_detect(dopt, out);
    if (*score) return cmd_score(sco, out);
  } catch (const SegmentationError& e) {
    err << "segmentation failed: " << e.what() << "\n";
    return kSegmentation;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kOther;
  }
  return kOther;
}

}  // namespace zeroline::cli
