#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phaseprior/denoiser.hpp"
#include "phaseprior/regularizers.hpp"

namespace phaseprior::bridge {

// Wire protocol shared with external denoiser / regularizer processes.
//
// Every message is one frame:
//   u32 little-endian  header length H
//   H bytes            UTF-8 JSON header
//   P bytes            raw payload, P = header["payload_bytes"]
// Plane payloads are row-major 32-bit little-endian IEEE floats, so
// P = height * width * 4.
//
// Request header:  {"kind", "sigma", "height", "width", "payload_bytes"}
//   kind is "denoise", "regularizer-grad" or "capabilities".
// Response header: {"status": "ok"|"error", "payload_bytes", ...}
//   ok denoise           -> "height", "width", payload = denoised plane
//   ok regularizer-grad  -> "height", "width", "value", payload = gradient
//   ok capabilities      -> "kinds", "sigma_range", optional "lipschitz"
//   error                -> "message", no payload

inline constexpr std::uint32_t kMaxHeaderBytes = 1u << 20;

enum class RequestKind { Denoise, RegularizerGrad, Capabilities };

std::string to_string(RequestKind kind);
RequestKind request_kind_from_string(const std::string& s);

struct Request {
  RequestKind kind = RequestKind::Denoise;
  double sigma = 1.0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> plane;

  bool operator==(const Request&) const = default;
};

struct Response {
  bool ok = true;
  std::string message;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> plane;
  std::optional<double> value;
  std::optional<double> lipschitz;
  std::vector<std::string> kinds;
  std::optional<std::pair<double, double>> sigma_range;

  bool operator==(const Response&) const = default;
};

std::vector<std::uint8_t> encode(const Request& req);
std::vector<std::uint8_t> encode(const Response& resp);
/// Throws BridgeError on malformed frames.
Request decode_request(std::span<const std::uint8_t> frame);
Response decode_response(std::span<const std::uint8_t> frame);

std::vector<float> to_float_plane(const RealPlane& p);
RealPlane from_float_plane(std::size_t height, std::size_t width, std::span<const float> data);

/// Bidirectional byte stream.
class Channel {
 public:
  virtual ~Channel() = default;
  /// Returns false on clean end-of-stream before any byte was read.
  virtual bool read_exact(std::span<std::uint8_t> out) = 0;
  virtual void write_all(std::span<const std::uint8_t> data) = 0;
};

/// Channel over a pair of file descriptors. Owns them when `owns` is set.
class FdChannel final : public Channel {
 public:
  FdChannel(int read_fd, int write_fd, bool owns);
  ~FdChannel() override;
  FdChannel(const FdChannel&) = delete;
  FdChannel& operator=(const FdChannel&) = delete;

  bool read_exact(std::span<std::uint8_t> out) override;
  void write_all(std::span<const std::uint8_t> data) override;
  void close_write();

 private:
  int read_fd_;
  int write_fd_;
  bool owns_;
};

/// Reads one complete frame; std::nullopt at end-of-stream.
std::optional<std::vector<std::uint8_t>> read_frame(Channel& ch);

/// One connection to a bridge process. Requests are serialized per client.
///
/// Endpoints:
///   exec:COMMAND        spawn COMMAND via /bin/sh and talk over its stdio
///   socket:PORT         TCP to 127.0.0.1:PORT
///   socket:HOST:PORT    TCP to HOST:PORT
class Client {
 public:
  static std::shared_ptr<Client> connect(const std::string& endpoint);
  explicit Client(std::unique_ptr<Channel> channel, int child_pid = -1);
  ~Client();
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  /// Sends one request and waits for the response. Error responses are
  /// returned, not thrown; transport failures throw BridgeError.
  Response call(const Request& req);
  Response capabilities(double sigma = 1.0);

 private:
  std::mutex mutex_;
  std::unique_ptr<Channel> channel_;
  int child_pid_;
};

/// D_sigma served by a bridge process ("denoise").
class BridgeDenoiser final : public Denoiser {
 public:
  explicit BridgeDenoiser(std::shared_ptr<Client> client);
  std::string name() const override { return "bridge-denoiser"; }
  RealPlane denoise(const RealPlane& plane, double sigma) const override;

 private:
  std::shared_ptr<Client> client_;
};

/// R_sigma served by a bridge process ("regularizer-grad"). The Lipschitz
/// bound is whatever the process declares under "capabilities".
class BridgeRegularizer final : public PlaneRegularizer {
 public:
  BridgeRegularizer(std::shared_ptr<Client> client, double sigma);

  RegularizerKind kind() const override { return RegularizerKind::ExternalPlugin; }
  std::string name() const override { return "bridge-regularizer"; }
  double sigma() const override { return sigma_; }
  double value(const RealPlane& p) const override;
  RealPlane gradient(const RealPlane& p) const override;
  PlaneEvaluation evaluate(const RealPlane& p) const override;
  std::optional<double> lipschitz() const override;
  std::shared_ptr<const PlaneRegularizer> at_sigma(double sigma) const override;

 private:
  std::shared_ptr<Client> client_;
  double sigma_;
};

}  // namespace phaseprior::bridge
