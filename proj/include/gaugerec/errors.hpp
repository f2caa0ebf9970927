#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gaugerec {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Errors that carry the set of offending grid nodes.
class NodeSetError : public Error {
 public:
  NodeSetError(const std::string& what, std::vector<std::size_t> nodes)
      : Error(what + " (" + std::to_string(nodes.size()) + " nodes)"), nodes_(std::move(nodes)) {}
  const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }

 private:
  std::vector<std::size_t> nodes_;
};

/// The local reconstruction hypotheses failed somewhere. The CLI maps these to exit code 2.
class AdmissibilityError : public NodeSetError {
 public:
  using NodeSetError::NodeSetError;
};

class VanishingU1 : public AdmissibilityError {
 public:
  explicit VanishingU1(std::vector<std::size_t> nodes)
      : AdmissibilityError("u1 falls below the admissibility floor", std::move(nodes)) {}
};

class FrameDegenerate : public AdmissibilityError {
 public:
  explicit FrameDegenerate(std::vector<std::size_t> nodes)
      : AdmissibilityError("ratio gradients do not form a well-conditioned frame", std::move(nodes)) {}
};

class MDependent : public AdmissibilityError {
 public:
  explicit MDependent(std::vector<std::size_t> nodes)
      : AdmissibilityError("constructed M matrices are linearly dependent", std::move(nodes)) {}
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

class EllipticityViolation : public NodeSetError {
 public:
  explicit EllipticityViolation(std::vector<std::size_t> nodes)
      : NodeSetError("real part of the diffusion tensor violates the ellipticity bounds", std::move(nodes)) {}
};

class VanishingGauge : public NodeSetError {
 public:
  explicit VanishingGauge(std::vector<std::size_t> nodes)
      : NodeSetError("gauge factor vanishes", std::move(nodes)) {}
};

class DegenerateTensor : public Error {
 public:
  using Error::Error;
};

class VanishingDeterminant : public NodeSetError {
 public:
  explicit VanishingDeterminant(std::vector<std::size_t> nodes)
      : NodeSetError("tensor determinant vanishes", std::move(nodes)) {}
};

class BranchAmbiguity : public NodeSetError {
 public:
  explicit BranchAmbiguity(std::vector<std::size_t> nodes)
      : NodeSetError("root branch cannot be continued consistently", std::move(nodes)) {}
};

class NonIntegrableField : public Error {
 public:
  NonIntegrableField(double curl_residual, double threshold)
      : Error("field is not a gradient: curl residual " + std::to_string(curl_residual) +
              " exceeds " + std::to_string(threshold)),
        curl_residual_(curl_residual) {}
  double curl_residual() const noexcept { return curl_residual_; }

 private:
  double curl_residual_;
};

class ComplexCoefficients : public Error {
 public:
  using Error::Error;
};

class NonPositiveH1 : public NodeSetError {
 public:
  explicit NonPositiveH1(std::vector<std::size_t> nodes)
      : NodeSetError("H1 is not strictly positive", std::move(nodes)) {}
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error("config error at '" + path + "': " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace gaugerec
