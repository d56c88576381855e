#include <gtest/gtest.h>

#include "edgeretrain/planner.hpp"
#include "edgeretrain/simworld.hpp"

using namespace edgeretrain;

namespace {

EnvSegment env(std::string label, double difficulty, double fp = 0.0) {
  EnvSegment e;
  e.start_s = 0;
  e.end_s = 1000;
  e.label = std::move(label);
  e.difficulty = difficulty;
  e.false_positive_rate = fp;
  return e;
}

FrameRecord frame(int tp, int fp, int objects) {
  FrameRecord f;
  for (int i = 0; i < tp; ++i) f.detections.push_back({0.9, true});
  for (int i = 0; i < fp; ++i) f.detections.push_back({0.3, false});
  f.oracle_object_count = objects;
  return f;
}

WorldParams calm_world() {
  WorldParams w;
  w.hardness_jitter = 0.0;
  return w;
}

}  // namespace

TEST(GenerateWindow, PerfectRegime) {
  StudentState student(1.0);
  Rng rng(1);
  const auto frames = generate_window(env("clear", 0.0), student, 10.0, 30.0, rng, calm_world());
  ASSERT_EQ(frames.size(), 300u);
  long objects = 0;
  for (const auto& f : frames) {
    objects += f.oracle_object_count;
    EXPECT_EQ(static_cast<int>(f.detections.size()), f.oracle_object_count);
    for (const auto& d : f.detections) {
      EXPECT_TRUE(d.is_true_positive);
      EXPECT_GE(d.confidence, 0.8);
    }
    EXPECT_EQ(score_f1(std::span<const FrameRecord>(&f, 1)), 1.0);
  }
  EXPECT_GT(objects, 0);
  EXPECT_EQ(score_f1(frames), 1.0);
}

TEST(GenerateWindow, ZeroProficiency) {
  StudentState student(0.0);
  Rng rng(2);
  const auto frames = generate_window(env("clear", 0.0), student, 10.0, 30.0, rng, calm_world());
  for (const auto& f : frames) {
    for (const auto& d : f.detections) EXPECT_FALSE(d.is_true_positive);
    if (f.oracle_object_count > 0) EXPECT_EQ(score_f1(std::span<const FrameRecord>(&f, 1)), 0.0);
  }
}

TEST(GenerateWindow, Deterministic) {
  StudentState student;
  Rng a(42), b(42);
  const auto x = generate_window(env("fog", 0.4, 0.05), student, 10.0, 30.0, a);
  const auto y = generate_window(env("fog", 0.4, 0.05), student, 10.0, 30.0, b);
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].frame_id, y[i].frame_id);
    EXPECT_EQ(x[i].timestamp_s, y[i].timestamp_s);
    EXPECT_EQ(x[i].frame_diff, y[i].frame_diff);
    EXPECT_EQ(x[i].oracle_object_count, y[i].oracle_object_count);
    ASSERT_EQ(x[i].detections.size(), y[i].detections.size());
    for (std::size_t k = 0; k < x[i].detections.size(); ++k) {
      EXPECT_EQ(x[i].detections[k].confidence, y[i].detections[k].confidence);
      EXPECT_EQ(x[i].detections[k].is_true_positive, y[i].detections[k].is_true_positive);
    }
  }
}

TEST(GenerateWindow, FramesAreWellFormed) {
  StudentState student;
  Rng rng(3);
  const auto frames = generate_window(env("snow", 0.5, 0.1), student, 10.0, 30.0, rng);
  double prev = -1;
  for (const auto& f : frames) {
    EXPECT_GT(f.timestamp_s, prev);
    prev = f.timestamp_s;
    EXPECT_GE(f.frame_diff, 0.0);
    long tp = 0;
    for (const auto& d : f.detections) {
      EXPECT_GE(d.confidence, 0.0);
      EXPECT_LE(d.confidence, 1.0);
      tp += d.is_true_positive;
    }
    EXPECT_LE(tp, f.oracle_object_count);
  }
}

TEST(GenerateWindow, DifficultyLowersF1) {
  StudentState student;
  double prev = 2.0;
  for (double d : {0.0, 0.3, 0.6, 0.9}) {
    Rng rng(11);
    const double f1 = score_f1(generate_window(env("x", d), student, 60.0, 30.0, rng));
    EXPECT_LT(f1, prev) << "difficulty " << d;
    prev = f1;
  }
}

TEST(ScoreF1, Examples) {
  // 8 TP, 2 FP, 2 FN spread over two frames.
  const std::vector<FrameRecord> frames = {frame(5, 1, 6), frame(3, 1, 4)};
  const auto c = count_f1(frames);
  EXPECT_EQ(c.true_positives, 8);
  EXPECT_EQ(c.false_positives, 2);
  EXPECT_EQ(c.false_negatives, 2);
  EXPECT_DOUBLE_EQ(score_f1(frames), 16.0 / 20.0);

  EXPECT_EQ(score_f1(std::vector<FrameRecord>{}), 1.0);
  EXPECT_EQ(score_f1(std::vector<FrameRecord>{frame(0, 0, 0)}), 1.0);
  EXPECT_EQ(score_f1(std::vector<FrameRecord>{frame(0, 0, 3)}), 0.0);
  EXPECT_EQ(score_f1(std::vector<FrameRecord>{frame(0, 2, 0)}), 0.0);
}

TEST(ApplyRetraining, TakesEffectAtCompletion) {
  StudentState student(0.92);
  const auto e = env("snow", 0.5);
  const TeacherProfile t{"m", 0.01, 0.5, 0.9, 1000};
  const RetrainConfig c{50, 100, "m"};
  apply_retraining(student, c, t, "snow", 300.0);
  const double old_p = 0.92 * 0.5;
  EXPECT_DOUBLE_EQ(student.detection_probability(e, 1.0, 295.0), old_p);
  EXPECT_DOUBLE_EQ(student.detection_probability(e, 1.0, 305.0), predict_accuracy(c, t));
  EXPECT_DOUBLE_EQ(student.detection_probability(e, 1.0, 300.0), predict_accuracy(c, t));
  // Other environments are untouched.
  EXPECT_DOUBLE_EQ(student.detection_probability(env("rain", 0.5), 1.0, 305.0), old_p);

  student.advance_to(305.0);
  EXPECT_TRUE(student.pending().empty());
  EXPECT_DOUBLE_EQ(student.proficiency().at("snow"), predict_accuracy(c, t));
}

TEST(ApplyRetraining, WindowStraddlingCompletion) {
  StudentState student(0.9);
  const TeacherProfile t{"m", 0.01, 0.95, 0.99, 1000};
  apply_retraining(student, {10, 10, "m"}, t, "night", 5.0);
  EnvSegment night = env("night", 0.9);
  WorldParams w = calm_world();
  w.object_density = 20;
  StudentState before(0.9);
  Rng a(5), b(5);
  const auto upd = generate_window(std::span<const EnvSegment>(&night, 1), student, w, {0.0, 10.0, 0, 1.0}, a);
  const auto old = generate_window(std::span<const EnvSegment>(&night, 1), before, w, {0.0, 10.0, 0, 1.0}, b);
  long tp_first_upd = 0, tp_first_old = 0, tp_second_upd = 0, tp_second_old = 0;
  for (std::size_t i = 0; i < upd.size(); ++i) {
    long u = 0, o = 0;
    for (const auto& d : upd[i].detections) u += d.is_true_positive;
    for (const auto& d : old[i].detections) o += d.is_true_positive;
    if (upd[i].timestamp_s < 5.0) {
      tp_first_upd += u;
      tp_first_old += o;
    } else {
      tp_second_upd += u;
      tp_second_old += o;
    }
  }
  EXPECT_EQ(tp_first_upd, tp_first_old);
  EXPECT_GT(tp_second_upd, 3 * tp_second_old);
}

TEST(ApplyRetraining, MaxClamp) {
  StudentState student(0.92);
  const TeacherProfile strong{"s", 0.01, 0.5, 0.95, 100};
  const TeacherProfile weak{"w", 0.01, 0.5, 0.6, 1000};
  apply_retraining(student, {50, 100, "s"}, strong, "fog", 10.0);
  apply_retraining(student, {5, 10, "w"}, weak, "fog", 20.0);
  const double strong_acc = predict_accuracy({50, 100, "s"}, strong);
  EXPECT_DOUBLE_EQ(*student.specialized("fog", 25.0), strong_acc);
  student.advance_to(25.0);
  EXPECT_DOUBLE_EQ(student.proficiency().at("fog"), strong_acc);
}

TEST(ApplyRetraining, LaterCompletionWins) {
  StudentState student(0.92);
  const TeacherProfile t{"m", 0.01, 0.5, 0.9, 1000};
  apply_retraining(student, {50, 100, "m"}, t, "fog", 40.0);
  apply_retraining(student, {5, 100, "m"}, t, "fog", 20.0);
  EXPECT_DOUBLE_EQ(*student.specialized("fog", 30.0), predict_accuracy({5, 100, "m"}, t));
  EXPECT_DOUBLE_EQ(*student.specialized("fog", 40.0), predict_accuracy({50, 100, "m"}, t));
  EXPECT_FALSE(student.specialized("fog", 10.0).has_value());
}

TEST(ApplyRetrainingProperty, NeverExceedsTeacherCeiling) {
  Rng rng(9);
  for (int i = 0; i < 500; ++i) {
    StudentState student(rng.uniform(0.0, 0.5));
    const TeacherProfile t{"m", 0.01, rng.uniform(0.3, 0.6), rng.uniform(0.6, 0.99), rng.uniform(100, 5000)};
    const RetrainConfig c{static_cast<int>(rng.uniform_int(1, 500)), static_cast<int>(rng.uniform_int(1, 5000)),
                          "m"};
    apply_retraining(student, c, t, "x", 1.0);
    EXPECT_LE(*student.specialized("x", 2.0), t.acc_ceiling);
  }
}

TEST(OracleLabeler, LinearTime) {
  OracleLabeler l{0.05};
  EXPECT_DOUBLE_EQ(l.labeling_time(30), 1.5);
  EXPECT_EQ(l.labeling_time(0), 0.0);
}
