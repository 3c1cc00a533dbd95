#include <random>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "oracles/tmpdir.hpp"
#include "tbx/errors.hpp"
#include "tbx/bbox_render.hpp"
#include "tbx/ingestion.hpp"
#include "tbx/scenario_io.hpp"
#include "tbx/synthetic_scenes.hpp"

using namespace tbx;

namespace
{

// KITTI-style P2 with a small baseline offset in the last column.
const char *kCalib = "P0: 721.5377 0 609.5593 0 0 721.5377 172.854 0 0 0 1 0\n"
                     "P1: 721.5377 0 609.5593 -387.5744 0 721.5377 172.854 0 0 0 1 0\n"
                     "P2: 721.5377 0 609.5593 44.85728 0 721.5377 172.854 0.2163791 0 0 1 0.002745884\n"
                     "P3: 721.5377 0 609.5593 -339.5242 0 721.5377 172.854 2.199936 0 0 1 0.002729905\n"
                     "R0_rect: 1 0 0 0 1 0 0 0 1\n";

sim::SimulationResult small_sim()
{
  auto spec = sim::demo_corpus(5, 1, 4.0)[0];
  return sim::simulate(spec);
}

} // namespace

TEST(Kitti, HandTracedLine)
{
  const auto f = parse_kitti_frame("Car 0.0 0 -1.57 100 150 200 250 1.5 1.6 3.9 2.0 1.5 10.0 -1.57\n", kCalib);
  ASSERT_EQ(f.entities.size(), 1u);
  const auto &e = f.entities[0];
  EXPECT_EQ(e.entity_id, "obj1");
  EXPECT_EQ(e.class_label, EntityClass::vehicle);
  // traced by hand: forward = z, left = -x, up = -y, yaw = -ry - pi/2
  EXPECT_DOUBLE_EQ(e.pose.x, 10.0);
  EXPECT_DOUBLE_EQ(e.pose.y, -2.0);
  EXPECT_DOUBLE_EQ(e.pose.z, -1.5);
  EXPECT_NEAR(e.pose.yaw, -0.000796327, 1e-9);
  EXPECT_EQ(e.dimensions, (Dimensions{3.9, 1.6, 1.5}));
  ASSERT_TRUE(f.calibration);
  EXPECT_EQ(f.calibration->image_width, 1242);
}

TEST(Kitti, CalibrationReproducesP2Projection)
{
  const auto f = parse_kitti_frame("Car 0 0 0 0 0 0 0 1.5 1.6 3.9 2.0 1.5 10.0 -1.57\n"
                                   "Pedestrian 0 0 0 0 0 0 0 1.8 0.6 0.8 -4.0 1.7 22.0 0.3\n",
                                   kCalib);
  const double p2[3][4] = {{721.5377, 0, 609.5593, 44.85728},
                           {0, 721.5377, 172.854, 0.2163791},
                           {0, 0, 1, 0.002745884}};
  const double cam[2][3] = {{2.0, 1.5 - 0.75, 10.0}, {-4.0, 1.7 - 0.9, 22.0}};
  for (int i = 0; i < 2; ++i)
  {
    double q[3];
    for (int r = 0; r < 3; ++r)
      q[r] = p2[r][0] * cam[i][0] + p2[r][1] * cam[i][1] + p2[r][2] * cam[i][2] + p2[r][3];
    const auto &e = f.entities[static_cast<std::size_t>(i)];
    const auto px = project_point(Vec3(e.pose.x, e.pose.y, e.pose.z + e.dimensions.height / 2), *f.calibration);
    ASSERT_TRUE(px);
    EXPECT_NEAR(px->x(), q[0] / q[2], 1e-6);
    EXPECT_NEAR(px->y(), q[1] / q[2], 1e-6);
  }
}

TEST(Kitti, EmptyDontCareAndErrors)
{
  EXPECT_TRUE(parse_kitti_frame("", kCalib).entities.empty());
  EXPECT_TRUE(parse_kitti_frame("DontCare -1 -1 -10 1 2 3 4 -1 -1 -1 -1000 -1000 -1000 -10\n", kCalib).entities.empty());
  try
  {
    parse_kitti_frame("Car 0 0 0 0 0 0 0 1.5 1.6 3.9 2.0 1.5 10.0 -1.57\nCar 0 0 0 0 0 0 0 1.5 1.6 3.9 2.0 1.5 10.0\n",
                      kCalib);
    FAIL() << "expected ParseError";
  }
  catch (const ParseError &e)
  {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_kitti_frame("Blimp 0 0 0 0 0 0 0 1 1 1 0 0 5 0\n", kCalib), ParseError);
  EXPECT_THROW(parse_kitti_frame("Car 0 0 0 0 0 0 0 0 1 1 0 0 5 0\n", kCalib), ParseError);
  EXPECT_THROW(parse_kitti_frame("Car 0 0 0 0 0 0 0 1 1 1 0 0 five 0\n", kCalib), ParseError);
  EXPECT_THROW(parse_kitti_frame("", "P0: 1 0 0 0 0 1 0 0 0 0 1 0\n"), CalibrationRequired);
}

TEST(Kitti, WriteParseRoundTrip)
{
  FrameObservation f;
  f.entities.push_back({"obj1", EntityClass::vehicle, Pose(12.5, -3.25, -1.6, 0.4), {4.2, 1.8, 1.5}});
  f.entities.push_back({"obj2", EntityClass::cyclist, Pose(7, 2, -1.7, -2.0), {1.8, 0.6, 1.7}});
  f.calibration = forward_camera(721.5, 721.5, 609.6, 172.9, 1242, 375, 1.65);
  const auto back = parse_kitti_frame(write_kitti_labels(f), write_kitti_calib(*f.calibration));
  ASSERT_EQ(back.entities.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i)
  {
    EXPECT_EQ(back.entities[i].class_label, f.entities[i].class_label);
    EXPECT_NEAR(back.entities[i].pose.x, f.entities[i].pose.x, 1e-12);
    EXPECT_NEAR(back.entities[i].pose.y, f.entities[i].pose.y, 1e-12);
    EXPECT_NEAR(back.entities[i].pose.z, f.entities[i].pose.z, 1e-12);
    EXPECT_NEAR(normalize_angle(back.entities[i].pose.yaw - f.entities[i].pose.yaw), 0.0, 1e-12);
  }
  EXPECT_TRUE(back.calibration->ego_to_camera.matrix().isApprox(f.calibration->ego_to_camera.matrix(), 1e-12));
  const auto dir = testutil::scratch("kitti");
  testutil::spit(dir / "000000.txt", write_kitti_labels(f));
  testutil::spit(dir / "calib.txt", write_kitti_calib(*f.calibration));
  EXPECT_EQ(load_kitti_frame((dir / "000000.txt").string(), (dir / "calib.txt").string()).entities.size(), 2u);
  EXPECT_THROW(load_kitti_frame((dir / "nope.txt").string(), (dir / "calib.txt").string()), IoError);
}

TEST(Interchange, MinimalDocument)
{
  const auto doc = nlohmann::json::parse(R"({"schema":"tbx-seq/1","meta":{"dataset":"x","frequency_hz":10},
    "frames":[{"t":0,"ego":{"x":0,"y":0,"z":0,"yaw":0},"entities":[],"image":null}]})");
  const auto seq = sequence_from_json(doc);
  EXPECT_EQ(seq.frames.size(), 1u);
  EXPECT_FALSE(seq.lane_graph);
}

TEST(Interchange, NonMonotoneTimestampsNameBothFrames)
{
  auto seq = small_sim().sequence;
  seq.frames[7].timestamp = seq.frames[6].timestamp;
  try
  {
    sequence_from_json(to_json(seq));
    FAIL() << "expected ValidationError";
  }
  catch (const ValidationError &e)
  {
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_EQ(e.issues()[0].path, "/frames/7/t");
    EXPECT_NE(e.issues()[0].message.find("frame 6"), std::string::npos);
  }
}

TEST(Interchange, StructuralIssuesCarryPointers)
{
  auto doc = to_json(small_sim().sequence);
  doc["frames"][2]["entities"][0]["x"] = "far";
  doc["frames"][3].erase("ego");
  doc["meta"]["frequency_hz"] = -1;
  try
  {
    sequence_from_json(doc);
    FAIL();
  }
  catch (const ValidationError &e)
  {
    std::set<std::string> paths;
    for (const auto &i : e.issues())
      paths.insert(i.path);
    EXPECT_TRUE(paths.count("/frames/2/entities/0/x"));
    EXPECT_TRUE(paths.count("/frames/3/ego"));
    EXPECT_TRUE(paths.count("/meta/frequency_hz"));
  }
}

TEST(Interchange, SaveLoadIdentityAndByteStability)
{
  const auto seq = small_sim().sequence;
  const auto dir = testutil::scratch("interchange");
  save_interchange(seq, (dir / "a.json").string());
  save_interchange(seq, (dir / "b.json").string(), nlohmann::json{{"tool", "test"}});
  save_interchange(seq, (dir / "c.json").string());
  EXPECT_EQ(load_interchange((dir / "a.json").string()), seq);
  EXPECT_EQ(load_interchange((dir / "b.json").string()), seq);
  EXPECT_EQ(testutil::slurp(dir / "a.json"), testutil::slurp(dir / "c.json"));
  // streamed bytes are the sorted-key dump of the same document
  EXPECT_EQ(nlohmann::json::parse(testutil::slurp(dir / "a.json")), to_json(seq));
  EXPECT_TRUE(validate_interchange((dir / "a.json").string()).empty());
}

TEST(Interchange, LoadErrors)
{
  const auto dir = testutil::scratch("interchange_err");
  EXPECT_THROW(load_interchange((dir / "missing.json").string()), IoError);
  testutil::spit(dir / "bad.json", "{\"frames\": [");
  EXPECT_THROW(load_interchange((dir / "bad.json").string()), ParseError);
  EXPECT_EQ(validate_interchange((dir / "bad.json").string()).size(), 1u);
}

TEST(Interchange, StreamingWriteHasBoundedMemory)
{
  const auto dir = testutil::scratch("stream");
  const std::string path = (dir / "big.json").string();
  FrameObservation proto;
  for (int i = 0; i < 20; ++i)
    proto.entities.push_back({"e" + std::to_string(i), EntityClass::vehicle, Pose(i * 3.0, 1.5, 0, 0.1 * i), {4.5, 1.9, 1.6}});
  proto.calibration = forward_camera(700, 700, 640, 360, 1280, 720);

  const pid_t pid = fork();
  ASSERT_GE(pid, 0);
  if (pid == 0)
  {
    rusage before{};
    getrusage(RUSAGE_SELF, &before);
    {
      InterchangeWriter w(path, SequenceMeta{"big", "test", 10.0}, std::nullopt);
      for (int k = 0; k < 10000; ++k)
      {
        FrameObservation f = proto;
        f.timestamp = k * 0.1;
        f.ego_pose = Pose(k * 1.0, 0, 0, 0);
        f.image_ref = "frames/big/" + std::to_string(k) + ".ppm";
        w.add_frame(f);
      }
      w.finish();
    }
    rusage after{};
    getrusage(RUSAGE_SELF, &after);
    const long grew_kb = after.ru_maxrss - before.ru_maxrss;
    _exit(grew_kb < 8 * 1024 ? 0 : 1);
  }
  int status = 0;
  waitpid(pid, &status, 0);
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0) << "peak RSS grew by 8 MiB or more while streaming";
  const auto size = std::filesystem::file_size(path);
  EXPECT_GT(size, 20u * 1024 * 1024) << "file should dwarf the memory bound";
  const auto seq = load_interchange(path);
  EXPECT_EQ(seq.frames.size(), 10000u);
  EXPECT_EQ(seq.frames[9999].entities.size(), 20u);
}

TEST(Interchange, FuzzedDocumentsFailStructurally)
{
  const auto base = to_json(small_sim().sequence);
  const auto flat = base.flatten();
  std::vector<std::string> keys;
  for (const auto &[k, v] : flat.items())
    keys.push_back(k);
  std::mt19937_64 rng(99);
  const std::vector<nlohmann::json> junk{nullptr, "x", -1, 0, 1e308, true, nlohmann::json::array(),
                                         nlohmann::json::object(), std::nan("")};
  std::size_t rejected = 0;
  for (int trial = 0; trial < 1500; ++trial)
  {
    auto f = flat;
    const int edits = 1 + static_cast<int>(rng() % 4);
    for (int e = 0; e < edits; ++e)
    {
      const auto &key = keys[rng() % keys.size()];
      if (rng() % 3 == 0)
        f.erase(key);
      else
        f[key] = junk[rng() % junk.size()];
    }
    nlohmann::json doc;
    try
    {
      doc = f.unflatten();
    }
    catch (const nlohmann::json::exception &)
    {
      continue;
    }
    try
    {
      sequence_from_json(doc);
    }
    catch (const ValidationError &err)
    {
      EXPECT_FALSE(err.issues().empty());
      ++rejected;
    }
  }
  EXPECT_GT(rejected, 1000u);

  // byte-level corruption of the serialized text
  const auto dir = testutil::scratch("fuzz");
  const std::string text = base.dump();
  for (int trial = 0; trial < 300; ++trial)
  {
    std::string t = text;
    for (int e = 0; e < 3; ++e)
      t[rng() % t.size()] = static_cast<char>(rng() % 128);
    testutil::spit(dir / "f.json", t);
    EXPECT_NO_THROW(validate_interchange((dir / "f.json").string()));
  }
}
