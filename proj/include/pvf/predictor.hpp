#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace pvf {

/// A trained binary classifier. Implementations are immutable after training,
/// so one instance can be shared by any number of evaluating threads.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual Eigen::VectorXi predict(const Eigen::MatrixXd& x) const = 0;
  virtual std::string descriptor() const = 0;
  virtual std::string serialize() const = 0;
};

using CandidatePool = std::vector<std::shared_ptr<const Predictor>>;

}  // namespace pvf
