#include "tbx/ingestion.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/LU>
#include <fmt/format.h>

#include "tbx/errors.hpp"

namespace tbx
{

// ---- KITTI --------------------------------------------------------------

namespace
{

std::vector<std::string> split_ws(std::string_view line)
{
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  for (std::string tok; in >> tok;)
    out.push_back(tok);
  return out;
}

double parse_double(const std::string &tok, std::size_t line, std::string_view field)
{
  std::size_t used = 0;
  double v = 0.0;
  try
  {
    v = std::stod(tok, &used);
  }
  catch (const std::exception &)
  {
    used = 0;
  }
  if (used != tok.size() || !std::isfinite(v))
    throw ParseError(line, fmt::format("field {} is not a finite number: '{}'", field, tok));
  return v;
}

std::vector<std::string_view> lines_of(std::string_view text)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size())
  {
    const auto nl = text.find('\n', start);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    out.push_back(line);
    if (nl == std::string_view::npos)
      break;
    start = nl + 1;
  }
  return out;
}

std::optional<EntityClass> kitti_class(std::string_view type)
{
  if (type == "Car" || type == "Van" || type == "Truck" || type == "Tram")
    return EntityClass::vehicle;
  if (type == "Pedestrian" || type == "Person_sitting")
    return EntityClass::pedestrian;
  if (type == "Cyclist")
    return EntityClass::cyclist;
  if (type == "Misc")
    return EntityClass::other;
  return std::nullopt;
}

std::string_view kitti_type(EntityClass c)
{
  switch (c)
  {
  case EntityClass::vehicle:
    return "Car";
  case EntityClass::pedestrian:
    return "Pedestrian";
  case EntityClass::cyclist:
    return "Cyclist";
  case EntityClass::other:
    break;
  }
  return "Misc";
}

constexpr std::string_view kFieldNames[15] = {"type",  "truncated", "occluded", "alpha",  "bbox_left",
                                              "bbox_top", "bbox_right", "bbox_bottom", "height", "width",
                                              "length", "x",         "y",        "z",      "rotation_y"};

} // namespace

Eigen::Matrix3d kitti_ego_to_camera_rotation()
{
  Eigen::Matrix3d r;
  // camera x = -ego y, camera y = -ego z, camera z = ego x
  r << 0, -1, 0, 0, 0, -1, 1, 0, 0;
  return r;
}

FrameObservation parse_kitti_frame(std::string_view label_text, std::string_view calib_text,
                                   const KittiOptions &options)
{
  FrameObservation frame;
  frame.timestamp = options.timestamp;
  frame.image_ref = options.image_ref;

  std::optional<Eigen::Matrix<double, 3, 4>> p2;
  const auto calib_lines = lines_of(calib_text);
  for (std::size_t i = 0; i < calib_lines.size(); ++i)
  {
    const auto toks = split_ws(calib_lines[i]);
    if (toks.empty() || toks[0] != "P2:")
      continue;
    if (toks.size() != 13)
      throw ParseError(i + 1, fmt::format("P2 needs 12 values, found {}", toks.size() - 1));
    Eigen::Matrix<double, 3, 4> p;
    for (int k = 0; k < 12; ++k)
      p(k / 4, k % 4) = parse_double(toks[static_cast<std::size_t>(k) + 1], i + 1, "P2");
    p2 = p;
  }
  if (!p2)
    throw CalibrationRequired("KITTI calib text has no P2 projection");

  CameraCalibration calib;
  calib.intrinsics = p2->leftCols<3>();
  if (std::abs(calib.intrinsics.determinant()) < 1e-12)
    throw ParseError(0, "P2 intrinsic block is singular");
  const Vec3 t = calib.intrinsics.lu().solve(p2->col(3));
  calib.ego_to_camera.linear() = kitti_ego_to_camera_rotation();
  calib.ego_to_camera.translation() = t;
  calib.image_width = options.image_width;
  calib.image_height = options.image_height;
  frame.calibration = calib;

  const auto lines = lines_of(label_text);
  for (std::size_t i = 0; i < lines.size(); ++i)
  {
    const std::size_t line_no = i + 1;
    const auto toks = split_ws(lines[i]);
    if (toks.empty())
      continue;
    if (toks.size() != 15)
      throw ParseError(line_no, fmt::format("expected 15 fields, found {}", toks.size()));
    if (toks[0] == "DontCare")
      continue;
    const auto cls = kitti_class(toks[0]);
    if (!cls)
      throw ParseError(line_no, fmt::format("unknown object type '{}'", toks[0]));
    std::array<double, 15> v{};
    for (std::size_t k = 1; k < 15; ++k)
      v[k] = parse_double(toks[k], line_no, kFieldNames[k]);
    const double h = v[8];
    const double w = v[9];
    const double l = v[10];
    if (!(h > 0.0 && w > 0.0 && l > 0.0))
      throw ParseError(line_no, "box dimensions must be positive");
    EntityObservation e;
    e.entity_id = fmt::format("obj{}", line_no);
    e.class_label = *cls;
    e.pose = Pose(v[13], -v[11], -v[12], -v[14] - kPi / 2.0);
    e.dimensions = {l, w, h};
    frame.entities.push_back(std::move(e));
  }
  return frame;
}

namespace
{

std::string read_file(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

FrameObservation load_kitti_frame(const std::string &label_path, const std::string &calib_path,
                                  const KittiOptions &options)
{
  const auto labels = read_file(label_path);
  const auto calib = read_file(calib_path);
  try
  {
    return parse_kitti_frame(labels, calib, options);
  }
  catch (const ParseError &e)
  {
    throw ParseError(e.line(), fmt::format("{}: {}", label_path, e.what()));
  }
}

std::string write_kitti_labels(const FrameObservation &frame)
{
  std::string out;
  for (const auto &e : frame.entities)
  {
    const double ry = normalize_angle(-e.pose.yaw - kPi / 2.0);
    out += fmt::format("{} 0.00 0 -10 0 0 0 0 {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g}\n",
                       kitti_type(e.class_label), e.dimensions.height, e.dimensions.width, e.dimensions.length,
                       -e.pose.y, -e.pose.z, e.pose.x, ry);
  }
  return out;
}

std::string write_kitti_calib(const CameraCalibration &calib)
{
  Eigen::Matrix<double, 3, 4> p2;
  p2.leftCols<3>() = calib.intrinsics;
  p2.col(3) = calib.intrinsics * calib.ego_to_camera.translation();
  Eigen::Matrix<double, 3, 4> p0;
  p0.leftCols<3>() = calib.intrinsics;
  p0.col(3).setZero();
  auto row = [](const Eigen::Matrix<double, 3, 4> &p) {
    std::string s;
    for (int k = 0; k < 12; ++k)
      s += fmt::format(" {:.17g}", p(k / 4, k % 4));
    return s;
  };
  std::string out;
  out += "P0:" + row(p0) + "\n";
  out += "P1:" + row(p0) + "\n";
  out += "P2:" + row(p2) + "\n";
  out += "P3:" + row(p2) + "\n";
  out += "R0_rect: 1 0 0 0 1 0 0 0 1\n";
  return out;
}

// ---- interchange --------------------------------------------------------

namespace
{

nlohmann::json points_json(const std::vector<Vec2> &pts)
{
  auto a = nlohmann::json::array();
  for (const auto &p : pts)
    a.push_back({p.x(), p.y()});
  return a;
}

nlohmann::json optional_string(const std::optional<std::string> &s)
{
  return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
}

nlohmann::json calib_json(const CameraCalibration &c)
{
  std::vector<double> k;
  std::vector<double> r;
  for (int i = 0; i < 3; ++i)
  {
    for (int j = 0; j < 3; ++j)
    {
      k.push_back(c.intrinsics(i, j));
      r.push_back(c.ego_to_camera.linear()(i, j));
    }
  }
  const Vec3 t = c.ego_to_camera.translation();
  return {{"K", k}, {"R", r}, {"t", {t.x(), t.y(), t.z()}}, {"width", c.image_width}, {"height", c.image_height}};
}

} // namespace

nlohmann::json to_json(const FrameObservation &f)
{
  auto entities = nlohmann::json::array();
  for (const auto &e : f.entities)
  {
    entities.push_back({{"id", e.entity_id},
                        {"class", to_string(e.class_label)},
                        {"x", e.pose.x},
                        {"y", e.pose.y},
                        {"z", e.pose.z},
                        {"yaw", e.pose.yaw},
                        {"l", e.dimensions.length},
                        {"w", e.dimensions.width},
                        {"h", e.dimensions.height}});
  }
  nlohmann::json j{{"t", f.timestamp},
                   {"ego", {{"x", f.ego_pose.x}, {"y", f.ego_pose.y}, {"z", f.ego_pose.z}, {"yaw", f.ego_pose.yaw}}},
                   {"entities", entities},
                   {"image", optional_string(f.image_ref)}};
  if (f.calibration)
    j["calib"] = calib_json(*f.calibration);
  return j;
}

nlohmann::json to_json(const LaneSegment &l)
{
  return {{"id", l.lane_id},
          {"centerline", points_json(l.centerline)},
          {"boundary", points_json(l.boundary_polygon)},
          {"left_neighbor", optional_string(l.left_neighbor_id)},
          {"right_neighbor", optional_string(l.right_neighbor_id)},
          {"successors", l.successor_ids},
          {"predecessors", l.predecessor_ids},
          {"is_intersection", l.is_intersection}};
}

nlohmann::json to_json(const SequenceMeta &m)
{
  return {{"name", m.name}, {"dataset", m.dataset}, {"frequency_hz", m.frequency_hz}};
}

nlohmann::json to_json(const SequenceObservation &seq)
{
  auto frames = nlohmann::json::array();
  for (const auto &f : seq.frames)
    frames.push_back(to_json(f));
  nlohmann::json doc{{"schema", kInterchangeSchema}, {"meta", to_json(seq.meta)}, {"frames", frames}};
  if (seq.lane_graph)
  {
    auto lanes = nlohmann::json::array();
    for (const auto &l : seq.lane_graph->lanes())
      lanes.push_back(to_json(l));
    doc["lanes"] = lanes;
  }
  return doc;
}

namespace
{

/// Typed field access that records problems instead of throwing.
class Reader
{
public:
  std::vector<ValidationIssue> issues;

  void add(std::string path, std::string message) { issues.push_back({std::move(path), std::move(message)}); }

  const nlohmann::json *field(const nlohmann::json &obj, const char *key, const std::string &path,
                              bool required = true)
  {
    const auto it = obj.find(key);
    if (it == obj.end())
    {
      if (required)
        add(path + "/" + key, "missing required field");
      return nullptr;
    }
    return &*it;
  }

  double number(const nlohmann::json &obj, const char *key, const std::string &path)
  {
    const auto *v = field(obj, key, path);
    if (v == nullptr)
      return 0.0;
    if (!v->is_number())
    {
      add(path + "/" + key, "expected a number");
      return 0.0;
    }
    const double d = v->get<double>();
    if (!std::isfinite(d))
    {
      add(path + "/" + key, "number is not finite");
      return 0.0;
    }
    return d;
  }

  std::string string(const nlohmann::json &obj, const char *key, const std::string &path)
  {
    const auto *v = field(obj, key, path);
    if (v == nullptr)
      return {};
    if (!v->is_string())
    {
      add(path + "/" + key, "expected a string");
      return {};
    }
    return v->get<std::string>();
  }

  std::optional<std::string> nullable_string(const nlohmann::json &obj, const char *key, const std::string &path)
  {
    const auto *v = field(obj, key, path, false);
    if (v == nullptr || v->is_null())
      return std::nullopt;
    if (!v->is_string())
    {
      add(path + "/" + key, "expected a string or null");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  const nlohmann::json *array(const nlohmann::json &obj, const char *key, const std::string &path,
                              bool required = true)
  {
    const auto *v = field(obj, key, path, required);
    if (v != nullptr && !v->is_array())
    {
      add(path + "/" + key, "expected an array");
      return nullptr;
    }
    return v;
  }

  const nlohmann::json *object(const nlohmann::json &obj, const char *key, const std::string &path,
                               bool required = true)
  {
    const auto *v = field(obj, key, path, required);
    if (v != nullptr && !v->is_object())
    {
      add(path + "/" + key, "expected an object");
      return nullptr;
    }
    return v;
  }

  std::vector<std::string> strings(const nlohmann::json &obj, const char *key, const std::string &path)
  {
    std::vector<std::string> out;
    const auto *a = array(obj, key, path, false);
    if (a == nullptr)
      return out;
    for (std::size_t i = 0; i < a->size(); ++i)
    {
      if (!(*a)[i].is_string())
        add(fmt::format("{}/{}/{}", path, key, i), "expected a string");
      else
        out.push_back((*a)[i].get<std::string>());
    }
    return out;
  }

  std::vector<Vec2> points(const nlohmann::json &obj, const char *key, const std::string &path)
  {
    std::vector<Vec2> out;
    const auto *a = array(obj, key, path);
    if (a == nullptr)
      return out;
    for (std::size_t i = 0; i < a->size(); ++i)
    {
      const auto &p = (*a)[i];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      {
        add(fmt::format("{}/{}/{}", path, key, i), "expected [x, y]");
        continue;
      }
      out.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return out;
  }

  std::vector<double> fixed_numbers(const nlohmann::json &obj, const char *key, const std::string &path,
                                    std::size_t count)
  {
    const auto *a = array(obj, key, path);
    if (a == nullptr)
      return {};
    if (a->size() != count)
    {
      add(path + "/" + key, fmt::format("expected {} numbers", count));
      return {};
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < count; ++i)
    {
      if (!(*a)[i].is_number())
      {
        add(fmt::format("{}/{}/{}", path, key, i), "expected a number");
        return {};
      }
      out.push_back((*a)[i].get<double>());
    }
    return out;
  }

  std::optional<Pose> pose(double x, double y, double z, double yaw, const std::string &path)
  {
    try
    {
      return Pose(x, y, z, yaw);
    }
    catch (const InvalidArgument &e)
    {
      add(path, e.what());
      return std::nullopt;
    }
  }
};

std::optional<CameraCalibration> read_calib(Reader &r, const nlohmann::json &c, const std::string &path)
{
  const auto before = r.issues.size();
  const auto k = r.fixed_numbers(c, "K", path, 9);
  const auto rot = r.fixed_numbers(c, "R", path, 9);
  const auto t = r.fixed_numbers(c, "t", path, 3);
  int w = 0;
  int h = 0;
  for (const auto &[key, out] : {std::pair<const char *, int *>{"width", &w}, {"height", &h}})
  {
    const auto *v = r.field(c, key, path);
    if (v == nullptr)
      continue;
    if (!v->is_number_integer())
      r.add(path + "/" + key, "expected an integer");
    else
      *out = v->get<int>();
  }
  if (r.issues.size() != before)
    return std::nullopt;
  CameraCalibration calib;
  Eigen::Matrix3d rm;
  for (int i = 0; i < 9; ++i)
  {
    calib.intrinsics(i / 3, i % 3) = k[static_cast<std::size_t>(i)];
    rm(i / 3, i % 3) = rot[static_cast<std::size_t>(i)];
  }
  calib.ego_to_camera.linear() = rm;
  calib.ego_to_camera.translation() = Vec3(t[0], t[1], t[2]);
  calib.image_width = w;
  calib.image_height = h;
  return calib;
}

} // namespace

SequenceObservation sequence_from_json(const nlohmann::json &doc)
{
  Reader r;
  SequenceObservation seq;
  if (!doc.is_object())
    throw ValidationError(std::vector<ValidationIssue>{{"", "document must be a JSON object"}});

  const auto schema = r.string(doc, "schema", "");
  if (doc.contains("schema") && doc["schema"].is_string() && schema != kInterchangeSchema)
    r.add("/schema", fmt::format("unsupported schema '{}', expected '{}'", schema, kInterchangeSchema));

  if (const auto *meta = r.object(doc, "meta", ""))
  {
    seq.meta.name = meta->contains("name") ? r.string(*meta, "name", "/meta") : std::string();
    seq.meta.dataset = r.string(*meta, "dataset", "/meta");
    seq.meta.frequency_hz = r.number(*meta, "frequency_hz", "/meta");
    if (!(seq.meta.frequency_hz > 0.0) && meta->contains("frequency_hz"))
      r.add("/meta/frequency_hz", "frequency must be positive");
  }

  if (const auto *lanes = r.array(doc, "lanes", "", false))
  {
    std::vector<LaneSegment> out;
    for (std::size_t i = 0; i < lanes->size(); ++i)
    {
      const auto &l = (*lanes)[i];
      const std::string p = fmt::format("/lanes/{}", i);
      if (!l.is_object())
      {
        r.add(p, "expected an object");
        continue;
      }
      LaneSegment seg;
      seg.lane_id = r.string(l, "id", p);
      seg.centerline = r.points(l, "centerline", p);
      seg.boundary_polygon = r.points(l, "boundary", p);
      seg.left_neighbor_id = r.nullable_string(l, "left_neighbor", p);
      seg.right_neighbor_id = r.nullable_string(l, "right_neighbor", p);
      seg.successor_ids = r.strings(l, "successors", p);
      seg.predecessor_ids = r.strings(l, "predecessors", p);
      if (const auto *v = r.field(l, "is_intersection", p, false))
      {
        if (!v->is_boolean())
          r.add(p + "/is_intersection", "expected a boolean");
        else
          seg.is_intersection = v->get<bool>();
      }
      out.push_back(std::move(seg));
    }
    seq.lane_graph = LaneGraph(std::move(out));
  }

  if (const auto *frames = r.array(doc, "frames", ""))
  {
    for (std::size_t i = 0; i < frames->size(); ++i)
    {
      const auto &f = (*frames)[i];
      const std::string p = fmt::format("/frames/{}", i);
      if (!f.is_object())
      {
        r.add(p, "expected an object");
        continue;
      }
      FrameObservation frame;
      frame.timestamp = r.number(f, "t", p);
      if (const auto *ego = r.object(f, "ego", p))
      {
        const std::string ep = p + "/ego";
        if (auto pose = r.pose(r.number(*ego, "x", ep), r.number(*ego, "y", ep), r.number(*ego, "z", ep),
                               r.number(*ego, "yaw", ep), ep))
          frame.ego_pose = *pose;
      }
      if (const auto *ents = r.array(f, "entities", p))
      {
        for (std::size_t k = 0; k < ents->size(); ++k)
        {
          const auto &e = (*ents)[k];
          const std::string ep = fmt::format("{}/entities/{}", p, k);
          if (!e.is_object())
          {
            r.add(ep, "expected an object");
            continue;
          }
          EntityObservation ent;
          ent.entity_id = r.string(e, "id", ep);
          const auto cls = r.string(e, "class", ep);
          try
          {
            if (e.contains("class") && e["class"].is_string())
              ent.class_label = parse_entity_class(cls);
          }
          catch (const InvalidArgument &err)
          {
            r.add(ep + "/class", err.what());
          }
          if (auto pose = r.pose(r.number(e, "x", ep), r.number(e, "y", ep), r.number(e, "z", ep),
                                 r.number(e, "yaw", ep), ep))
            ent.pose = *pose;
          ent.dimensions = {r.number(e, "l", ep), r.number(e, "w", ep), r.number(e, "h", ep)};
          frame.entities.push_back(std::move(ent));
        }
      }
      frame.image_ref = r.nullable_string(f, "image", p);
      if (const auto *c = r.object(f, "calib", p, false))
        frame.calibration = read_calib(r, *c, p + "/calib");
      seq.frames.push_back(std::move(frame));
    }
  }

  if (r.issues.empty())
  {
    auto issues = validate(seq);
    r.issues.insert(r.issues.end(), issues.begin(), issues.end());
  }
  if (!r.issues.empty())
    throw ValidationError(std::move(r.issues));
  return seq;
}

namespace
{

nlohmann::json parse_document(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError(path, "cannot open for reading");
  try
  {
    return nlohmann::json::parse(in);
  }
  catch (const nlohmann::json::parse_error &e)
  {
    throw ParseError(0, fmt::format("{}: invalid JSON at byte {}", path, e.byte));
  }
}

} // namespace

SequenceObservation load_interchange(const std::string &path)
{
  return sequence_from_json(parse_document(path));
}

std::vector<ValidationIssue> validate_interchange(const std::string &path)
{
  nlohmann::json doc;
  try
  {
    doc = parse_document(path);
  }
  catch (const ParseError &e)
  {
    return {{"", e.what()}};
  }
  try
  {
    sequence_from_json(doc);
  }
  catch (const ValidationError &e)
  {
    return e.issues();
  }
  return {};
}

InterchangeWriter::InterchangeWriter(const std::string &path, SequenceMeta meta, std::optional<LaneGraph> lanes,
                                     std::optional<nlohmann::json> provenance)
    : path_(path), out_(path, std::ios::binary), meta_(std::move(meta)), lanes_(std::move(lanes)),
      provenance_(std::move(provenance))
{
  if (!out_)
    throw IoError(path, "cannot open for writing");
  // keys in sorted order: frames, lanes, meta, provenance, schema
  out_ << "{\"frames\":[";
}

InterchangeWriter::~InterchangeWriter()
{
  if (!finished_)
  {
    try
    {
      finish();
    }
    catch (...)
    {
    }
  }
}

void InterchangeWriter::add_frame(const FrameObservation &frame)
{
  if (finished_)
    throw InvalidArgument("writer already finished");
  out_ << (frames_ == 0 ? "\n" : ",\n") << to_json(frame).dump();
  ++frames_;
  if (!out_)
    throw IoError(path_, "write failed");
}

void InterchangeWriter::finish()
{
  if (finished_)
    return;
  finished_ = true;
  out_ << "\n]";
  if (lanes_)
  {
    out_ << ",\"lanes\":[";
    const auto &lanes = lanes_->lanes();
    for (std::size_t i = 0; i < lanes.size(); ++i)
      out_ << (i == 0 ? "\n" : ",\n") << to_json(lanes[i]).dump();
    out_ << "\n]";
  }
  out_ << ",\"meta\":" << to_json(meta_).dump();
  if (provenance_)
    out_ << ",\"provenance\":" << provenance_->dump();
  out_ << ",\"schema\":" << nlohmann::json(kInterchangeSchema).dump()
       << "}\n";
  out_.close();
  if (!out_)
    throw IoError(path_, "write failed");
}

void save_interchange(const SequenceObservation &seq, const std::string &path,
                      const std::optional<nlohmann::json> &provenance)
{
  InterchangeWriter w(path, seq.meta, seq.lane_graph, provenance);
  for (const auto &f : seq.frames)
    w.add_frame(f);
  w.finish();
}

} // namespace tbx
