#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <vector>

#include "elio/core/parallel.hpp"
#include "elio/odometry/gravity_init.hpp"
#include "elio/odometry/propagation.hpp"
#include "elio/odometry/state.hpp"
#include "elio/preprocess/deskew.hpp"
#include "elio/registration/weighting.hpp"

namespace elio {

enum class WeightingMode { kAdaptive, kConstant };
enum class RegistrationMode { kEllipsoid, kPointToPoint };

struct EstimatorConfig {
  ProcessNoise noise;
  double sigma_lidar = 0.02;    ///< measurement noise std, meters
  double conv_threshold = 1e-4; ///< combined error-state increment norm
  int max_iterations = 10;
  int min_matches = 10;
  bool use_time_budget = true;     ///< disabled by deterministic runs
  double time_budget_factor = 0.5; ///< fraction of the scan period
  WeightingMode weighting = WeightingMode::kAdaptive;
  RegistrationMode registration = RegistrationMode::kEllipsoid;
  RigidTransform imu_from_lidar;
  int init_min_samples = 20;
  double init_max_accel_variance = 0.05;
  int threads = 1;
  /// Test hook: run the full adaptive path, then solve with unit weights.
  bool debug_force_unit_weights = false;
  // initial error covariance diagonal
  double init_pos_var = 1e-6;
  double init_rot_var = 1e-6;
  double init_vel_var = 1e-2;
  double init_accel_bias_var = 1e-2;
  double init_gyro_bias_var = 1e-4;
  double init_gravity_var = 1e-2;
};

/// A deskewed scan in the LiDAR frame, ready for registration.
struct PreparedScan {
  Timestamp stamp = 0.0;
  std::vector<Vec3> points;
  std::vector<int> bins;    ///< radial bin per point
  double mean_range = 0.0;  ///< mean of point ranges
  double scan_period = 0.1;
};

struct UpdateReport {
  bool sufficient_matches = true;
  int matches = 0;
  int iterations = 0;
  double eta = 1.0;
  double psi = 1.0;
  double mu = 1.0;
  double residual_rms = 0.0;
};

/**
 * Tightly coupled iterated-EKF odometry: IMU samples forward-propagate the
 * state between scans (recording the pose trail used for deskew), and each
 * scan refines it through weighted scan-to-map registration.
 *
 * One logical state machine: feed samples and scans in time order.
 */
class Estimator {
 public:
  Estimator(const EstimatorConfig& config, const SensorModel& sensor)
      : config_(config), sensor_(sensor) {}

  bool initialized() const { return initialized_; }
  const NavState& state() const { return state_; }
  const Cov18& covariance() const { return cov_; }
  const PoseTrail& trail() const { return trail_; }
  double trajectory_length() const { return odometer_.length(); }
  Timestamp state_time() const { return state_time_; }

  /// Initializes gravity and the gyro bias from a quasi-static window and
  /// anchors the global frame at the current IMU pose. Throws NotStatic.
  void initialize(std::span<const ImuSample> samples, Timestamp start_time) {
    const GravityInit init = initialize_gravity(samples, config_.init_min_samples,
                                                config_.init_max_accel_variance);
    state_ = NavState{};
    state_.gravity = init.gravity;
    state_.gyro_bias = init.gyro_bias;
    state_.accel_bias = init.accel_bias;
    cov_.setZero();
    cov_.block<3, 3>(kIdxPos, kIdxPos) = config_.init_pos_var * Mat3::Identity();
    cov_.block<3, 3>(kIdxRot, kIdxRot) = config_.init_rot_var * Mat3::Identity();
    cov_.block<3, 3>(kIdxVel, kIdxVel) = config_.init_vel_var * Mat3::Identity();
    cov_.block<3, 3>(kIdxBa, kIdxBa) = config_.init_accel_bias_var * Mat3::Identity();
    cov_.block<3, 3>(kIdxBg, kIdxBg) = config_.init_gyro_bias_var * Mat3::Identity();
    cov_.block<3, 3>(kIdxGrav, kIdxGrav) = config_.init_gravity_var * Mat3::Identity();
    state_time_ = start_time;
    last_imu_.reset();
    trail_.clear();
    trail_.push(state_time_, state_.pose());
    odometer_ = TrajectoryOdometer{};
    odometer_.advance_to(state_.translation);
    initialized_ = true;
  }

  /// Propagates up to the sample stamp (holding the previous sample) and
  /// stores the sample for the next interval.
  void add_imu(const ImuSample& sample) {
    propagate_to(sample.stamp);
    last_imu_ = sample;
  }

  /// Propagates the held IMU sample forward to time t.
  void propagate_to(Timestamp t) {
    const double dt = t - state_time_;
    if (dt <= 0.0) return;
    if (last_imu_) {
      propagate(state_, cov_, *last_imu_, dt, config_.noise);
    } else {
      state_.translation += state_.velocity * dt;  // no sample yet; coast
    }
    state_time_ = t;
    trail_.push(state_time_, state_.pose());
  }

  /**
   * Iterated measurement update against the map. Matches are rebuilt each
   * iteration with a shrinking search radius; the weighted Gauss-Newton step
   * runs until the increment drops below the convergence threshold, the
   * iteration cap, or (when enabled) half the scan period of wall time.
   * Without enough matches the state stays at the prediction.
   */
  UpdateReport update_with_scan(const PreparedScan& scan, const GlobalMap& map) {
    const auto t_begin = std::chrono::steady_clock::now();
    UpdateReport report;
    const NavState predicted = state_;
    const Cov18 predicted_cov = cov_;
    const double s_now = odometer_.length();
    const Vec3 gravity_dir = state_.gravity.normalized();

    const Cov18 pred_info = invert_psd(predicted_cov);
    const Mat3 scan_cov_l = scan_covariance(scan.points);

    Cov18 posterior_info = Cov18::Zero();
    bool have_solution = false;
    std::vector<MatchRow> rows;
    std::vector<double> weights;

    int iterations = 0;
    while (iterations < config_.max_iterations) {
      ++iterations;
      rows = build_rows(scan, map, iterations - 1, s_now, gravity_dir);
      report.matches = static_cast<int>(rows.size());
      if (report.matches < config_.min_matches) {
        if (!have_solution) {
          report.sufficient_matches = false;
          state_ = predicted;
          cov_ = predicted_cov;
        }
        break;
      }

      weights.assign(rows.size(), 1.0);
      if (config_.weighting == WeightingMode::kAdaptive) {
        for (std::size_t i = 0; i < rows.size(); ++i) weights[i] = rows[i].weight;
        const Rot3 r_gl = state_.rotation * config_.imu_from_lidar.rotation;
        const Mat3 gamma_from_lidar =
            gravity_aligned_rotation(gravity_dir).matrix() * r_gl.matrix();
        const Vec3 cov_diag =
            (gamma_from_lidar * scan_cov_l * gamma_from_lidar.transpose()).diagonal();
        const ObservabilityReport obs =
            observability(rows, cov_diag, state_.rotation, r_gl, gravity_dir);
        const WeightPenalties pen = scale_weights(weights, state_.velocity, gravity_dir,
                                                  scan.mean_range, obs.eta);
        report.eta = obs.eta;
        report.psi = pen.psi;
        report.mu = pen.mu;
        if (config_.debug_force_unit_weights) weights.assign(rows.size(), 1.0);
      }

      // Weighted Gauss-Newton step on the error state about the prediction.
      const double inv_var = 1.0 / (config_.sigma_lidar * config_.sigma_lidar);
      Eigen::Matrix<double, 6, 6> h_info = Eigen::Matrix<double, 6, 6>::Zero();
      Eigen::Matrix<double, 6, 1> h_grad = Eigen::Matrix<double, 6, 1>::Zero();
      double residual_sq = 0.0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        Eigen::Matrix<double, 6, 1> h;
        h.head<3>() = rows[i].translation_dir;
        h.tail<3>() = rows[i].rotation_comp;
        const double coef = weights[i] * inv_var;
        h_info.noalias() += coef * h * h.transpose();
        h_grad.noalias() += coef * (-rows[i].residual) * h;
        residual_sq += rows[i].residual * rows[i].residual;
      }
      report.residual_rms = std::sqrt(residual_sq / static_cast<double>(rows.size()));

      posterior_info = pred_info;
      posterior_info.topLeftCorner<6, 6>() += h_info;
      Vec18 b = pred_info * boxminus(state_, predicted);
      b.head<6>() += h_grad;
      const Vec18 step = -posterior_info.ldlt().solve(b);
      state_ = boxplus(state_, step);
      have_solution = true;

      if (step.norm() < config_.conv_threshold) break;
      if (config_.use_time_budget) {
        const double budget = config_.time_budget_factor * scan.scan_period;
        const std::chrono::duration<double> elapsed =
            std::chrono::steady_clock::now() - t_begin;
        if (elapsed.count() > budget) break;
      }
    }
    report.iterations = iterations;

    if (have_solution) {
      cov_ = invert_psd(posterior_info);
    }
    odometer_.advance_to(state_.translation);
    state_time_ = scan.stamp;
    trail_.clear();
    trail_.push(state_time_, state_.pose());
    return report;
  }

 private:
  static Cov18 invert_psd(const Cov18& m) {
    Cov18 inv = m.ldlt().solve(Cov18::Identity());
    return 0.5 * (inv + inv.transpose()).eval();
  }

  static Mat3 scan_covariance(const std::vector<Vec3>& points) {
    if (points.empty()) return Mat3::Zero();
    Vec3 mean = Vec3::Zero();
    for (const Vec3& p : points) mean += p;
    mean /= static_cast<double>(points.size());
    Mat3 cov = Mat3::Zero();
    for (const Vec3& p : points) {
      const Vec3 d = p - mean;
      cov.noalias() += d * d.transpose();
    }
    return cov / static_cast<double>(points.size());
  }

  std::vector<MatchRow> build_rows(const PreparedScan& scan, const GlobalMap& map,
                                   int iteration, double s_now,
                                   const Vec3& gravity_dir) const {
    const RigidTransform pose_gi = state_.pose();
    const RigidTransform pose_gl = pose_gi * config_.imu_from_lidar;
    std::vector<std::optional<MatchRow>> slots(scan.points.size());
    parallel_for(scan.points.size(), config_.threads, [&](std::size_t i) {
      const Vec3 global_point = pose_gl * scan.points[i];
      const auto id = find_match(map, global_point, scan.bins[i], iteration, s_now);
      if (!id) return;
      const MapPoint& mp = map.meta(*id);
      const Ellipsoid& e = *mp.ellipsoid;
      const double l1 = e.saliencies.l1();
      Vec3 target;
      if (config_.registration == RegistrationMode::kPointToPoint) {
        target = map.position(*id);
      } else {
        const auto t = target_point(global_point, map.position(*id), e);
        if (!t) return;
        target = *t;
      }
      const auto rr = residual_row(global_point, target, pose_gi);
      if (!rr) return;
      MatchRow row;
      row.scan_point = global_point;
      row.map_id = *id;
      row.target = target;
      row.residual = rr->residual;
      row.translation_dir = rr->translation_dir;
      row.rotation_comp = rr->rotation_comp;
      row.weight = match_weight(s_now, mp.capture_traj_len, rr->translation_dir, gravity_dir);
      row.planarity = l1 > 0.0 ? e.saliencies.plane / l1 : 0.0;
      slots[i] = row;
    });
    std::vector<MatchRow> rows;
    rows.reserve(slots.size());
    for (auto& s : slots) {
      if (s) rows.push_back(*s);
    }
    return rows;
  }

  EstimatorConfig config_;
  SensorModel sensor_;
  NavState state_;
  Cov18 cov_ = Cov18::Identity();
  Timestamp state_time_ = 0.0;
  std::optional<ImuSample> last_imu_;
  PoseTrail trail_;
  TrajectoryOdometer odometer_;
  bool initialized_ = false;
};

}  // namespace elio
