#include "phaseprior/bridge.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <cmath>
#include <cstring>

#include <json.hpp>

namespace phaseprior::bridge {

using nlohmann::json;

std::string to_string(RequestKind kind) {
  switch (kind) {
    case RequestKind::Denoise:
      return "denoise";
    case RequestKind::RegularizerGrad:
      return "regularizer-grad";
    case RequestKind::Capabilities:
      return "capabilities";
  }
  return "unknown";
}

RequestKind request_kind_from_string(const std::string& s) {
  if (s == "denoise") return RequestKind::Denoise;
  if (s == "regularizer-grad") return RequestKind::RegularizerGrad;
  if (s == "capabilities") return RequestKind::Capabilities;
  throw BridgeError("unknown request kind '" + s + "'");
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(in[std::size_t(i)]) << (8 * i);
  return v;
}

std::vector<std::uint8_t> make_frame(const json& header, std::span<const float> plane) {
  const std::string text = header.dump();
  std::vector<std::uint8_t> out;
  out.reserve(4 + text.size() + plane.size() * 4);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (float f : plane) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

struct SplitFrame {
  json header;
  std::span<const std::uint8_t> payload;
};

SplitFrame split_frame(std::span<const std::uint8_t> frame) {
  if (frame.size() < 4) throw BridgeError("frame shorter than its length prefix");
  const std::uint32_t hlen = get_u32(frame);
  if (hlen > kMaxHeaderBytes || 4 + std::size_t(hlen) > frame.size()) {
    throw BridgeError("frame header length exceeds the frame");
  }
  SplitFrame out;
  try {
    out.header = json::parse(frame.begin() + 4, frame.begin() + 4 + hlen);
  } catch (const json::exception& e) {
    throw BridgeError(std::string("frame header is not valid JSON: ") + e.what());
  }
  if (!out.header.is_object()) throw BridgeError("frame header must be a JSON object");
  const std::size_t payload_bytes = out.header.value("payload_bytes", std::size_t{0});
  if (4 + std::size_t(hlen) + payload_bytes != frame.size()) {
    throw BridgeError("payload_bytes does not match the frame length");
  }
  out.payload = frame.subspan(4 + hlen);
  return out;
}

std::vector<float> decode_plane(std::span<const std::uint8_t> payload, std::size_t h,
                                std::size_t w) {
  if (payload.size() != h * w * 4) {
    throw BridgeError("plane payload length is not height*width*4 bytes");
  }
  std::vector<float> plane(h * w);
  for (std::size_t i = 0; i < plane.size(); ++i) {
    plane[i] = std::bit_cast<float>(get_u32(payload.subspan(4 * i, 4)));
  }
  return plane;
}

template <class T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw BridgeError(std::string("frame header field '") + key + "': " + e.what());
  }
}

}  // namespace

std::vector<std::uint8_t> encode(const Request& req) {
  if (req.kind != RequestKind::Capabilities && req.plane.size() != req.height * req.width) {
    throw BridgeError("request plane length does not match height*width");
  }
  json h;
  h["kind"] = to_string(req.kind);
  h["sigma"] = req.sigma;
  h["height"] = req.height;
  h["width"] = req.width;
  h["payload_bytes"] = req.plane.size() * 4;
  return make_frame(h, req.plane);
}

std::vector<std::uint8_t> encode(const Response& resp) {
  json h;
  h["status"] = resp.ok ? "ok" : "error";
  if (!resp.ok) {
    h["message"] = resp.message;
    h["payload_bytes"] = 0;
    return make_frame(h, {});
  }
  h["height"] = resp.height;
  h["width"] = resp.width;
  if (!resp.message.empty()) h["message"] = resp.message;
  if (resp.value) h["value"] = *resp.value;
  if (resp.lipschitz) h["lipschitz"] = *resp.lipschitz;
  if (!resp.kinds.empty()) h["kinds"] = resp.kinds;
  if (resp.sigma_range) h["sigma_range"] = {resp.sigma_range->first, resp.sigma_range->second};
  h["payload_bytes"] = resp.plane.size() * 4;
  return make_frame(h, resp.plane);
}

Request decode_request(std::span<const std::uint8_t> frame) {
  const auto f = split_frame(frame);
  Request req;
  req.kind = request_kind_from_string(field<std::string>(f.header, "kind"));
  req.sigma = field<double>(f.header, "sigma");
  req.height = field<std::size_t>(f.header, "height");
  req.width = field<std::size_t>(f.header, "width");
  if (req.kind != RequestKind::Capabilities && !(req.sigma > 0.0)) {
    throw BridgeError("request sigma must be > 0");
  }
  if (req.kind == RequestKind::Capabilities && f.payload.empty()) return req;
  req.plane = decode_plane(f.payload, req.height, req.width);
  return req;
}

Response decode_response(std::span<const std::uint8_t> frame) {
  const auto f = split_frame(frame);
  Response resp;
  const auto status = field<std::string>(f.header, "status");
  if (status != "ok" && status != "error") throw BridgeError("unknown response status");
  resp.ok = status == "ok";
  resp.message = f.header.value("message", std::string{});
  if (!resp.ok) return resp;
  resp.height = f.header.value("height", std::size_t{0});
  resp.width = f.header.value("width", std::size_t{0});
  if (f.header.contains("value")) resp.value = field<double>(f.header, "value");
  if (f.header.contains("lipschitz")) resp.lipschitz = field<double>(f.header, "lipschitz");
  if (f.header.contains("kinds")) resp.kinds = field<std::vector<std::string>>(f.header, "kinds");
  if (f.header.contains("sigma_range")) {
    const auto r = field<std::vector<double>>(f.header, "sigma_range");
    if (r.size() != 2) throw BridgeError("sigma_range must have two entries");
    resp.sigma_range = std::make_pair(r[0], r[1]);
  }
  if (!f.payload.empty()) resp.plane = decode_plane(f.payload, resp.height, resp.width);
  return resp;
}

std::vector<float> to_float_plane(const RealPlane& p) {
  std::vector<float> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = static_cast<float>(p[i]);
  return out;
}

RealPlane from_float_plane(std::size_t height, std::size_t width, std::span<const float> data) {
  if (data.size() != height * width) throw BridgeError("float plane payload does not match height*width");
  RealPlane p(height, width);
  for (std::size_t i = 0; i < data.size(); ++i) p[i] = data[i];
  return p;
}

// --- transport -------------------------------------------------------------

FdChannel::FdChannel(int read_fd, int write_fd, bool owns)
    : read_fd_(read_fd), write_fd_(write_fd), owns_(owns) {}

FdChannel::~FdChannel() {
  if (!owns_) return;
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  if (read_fd_ >= 0) ::close(read_fd_);
}

void FdChannel::close_write() {
  if (write_fd_ >= 0 && write_fd_ != read_fd_) {
    ::close(write_fd_);
    write_fd_ = -1;
  } else if (write_fd_ >= 0) {
    ::shutdown(write_fd_, SHUT_WR);
  }
}

bool FdChannel::read_exact(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    const ssize_t n = ::read(read_fd_, out.data() + done, out.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BridgeError(std::string("bridge read failed: ") + std::strerror(errno));
    }
    if (n == 0) {
      if (done == 0) return false;
      throw BridgeError("bridge stream ended mid-frame");
    }
    done += std::size_t(n);
  }
  return true;
}

void FdChannel::write_all(std::span<const std::uint8_t> data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(write_fd_, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BridgeError(std::string("bridge write failed: ") + std::strerror(errno));
    }
    done += std::size_t(n);
  }
}

std::optional<std::vector<std::uint8_t>> read_frame(Channel& ch) {
  std::vector<std::uint8_t> frame(4);
  if (!ch.read_exact(frame)) return std::nullopt;
  const std::uint32_t hlen = get_u32(frame);
  if (hlen > kMaxHeaderBytes) throw BridgeError("frame header too large");
  frame.resize(4 + hlen);
  if (!ch.read_exact(std::span(frame).subspan(4))) throw BridgeError("stream ended mid-frame");
  json header;
  try {
    header = json::parse(frame.begin() + 4, frame.end());
  } catch (const json::exception& e) {
    throw BridgeError(std::string("frame header is not valid JSON: ") + e.what());
  }
  const std::size_t payload = header.is_object() ? header.value("payload_bytes", std::size_t{0}) : 0;
  frame.resize(4 + hlen + payload);
  if (payload > 0 && !ch.read_exact(std::span(frame).subspan(4 + hlen))) {
    throw BridgeError("stream ended mid-frame");
  }
  return frame;
}

namespace {

std::unique_ptr<Client> spawn(const std::string& command) {
  int to_child[2];
  int from_child[2];
  if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
    throw BridgeError(std::string("pipe() failed: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw BridgeError(std::string("fork() failed: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  // A dead child must surface as a write error, not kill this process.
  ::signal(SIGPIPE, SIG_IGN);
  return std::make_unique<Client>(std::make_unique<FdChannel>(from_child[0], to_child[1], true),
                                  pid);
}

std::unique_ptr<Client> dial(const std::string& host, const std::string& port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &res) != 0 || !res) {
    throw BridgeError("cannot resolve bridge endpoint " + host + ":" + port);
  }
  int fd = -1;
  for (addrinfo* p = res; p; p = p->ai_next) {
    fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, p->ai_addr, p->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw BridgeError("cannot connect to bridge at " + host + ":" + port);
  ::signal(SIGPIPE, SIG_IGN);
  return std::make_unique<Client>(std::make_unique<FdChannel>(fd, fd, true));
}

}  // namespace

std::shared_ptr<Client> Client::connect(const std::string& endpoint) {
  if (endpoint.rfind("exec:", 0) == 0) return spawn(endpoint.substr(5));
  if (endpoint.rfind("socket:", 0) == 0) {
    const std::string rest = endpoint.substr(7);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) return dial("127.0.0.1", rest);
    return dial(rest.substr(0, colon), rest.substr(colon + 1));
  }
  throw BridgeError("unsupported bridge endpoint '" + endpoint +
                    "' (expected exec:COMMAND or socket:[HOST:]PORT)");
}

Client::Client(std::unique_ptr<Channel> channel, int child_pid)
    : channel_(std::move(channel)), child_pid_(child_pid) {}

Client::~Client() {
  if (auto* fd = dynamic_cast<FdChannel*>(channel_.get())) fd->close_write();
  channel_.reset();
  if (child_pid_ > 0) {
    int status = 0;
    ::waitpid(child_pid_, &status, 0);
  }
}

Response Client::call(const Request& req) {
  const auto bytes = encode(req);
  std::lock_guard lock(mutex_);
  channel_->write_all(bytes);
  auto frame = read_frame(*channel_);
  if (!frame) throw BridgeError("bridge closed the connection");
  return decode_response(*frame);
}

Response Client::capabilities(double sigma) {
  Request req;
  req.kind = RequestKind::Capabilities;
  req.sigma = sigma;
  return call(req);
}

// --- adapters --------------------------------------------------------------

namespace {

Response plane_call(Client& client, RequestKind kind, const RealPlane& p, double sigma) {
  Request req;
  req.kind = kind;
  req.sigma = sigma;
  req.height = p.height();
  req.width = p.width();
  req.plane = to_float_plane(p);
  auto resp = client.call(req);
  if (!resp.ok) throw BridgeError("bridge reported an error: " + resp.message);
  if (resp.height != p.height() || resp.width != p.width() || resp.plane.size() != p.size()) {
    throw BridgeError("bridge response shape differs from the request shape");
  }
  for (float v : resp.plane) {
    if (!std::isfinite(v)) throw BridgeError("bridge returned a non-finite plane");
  }
  return resp;
}

}  // namespace

BridgeDenoiser::BridgeDenoiser(std::shared_ptr<Client> client) : client_(std::move(client)) {
  if (!client_) throw BridgeError("bridge denoiser needs a client");
}

RealPlane BridgeDenoiser::denoise(const RealPlane& plane, double sigma) const {
  const auto resp = plane_call(*client_, RequestKind::Denoise, plane, sigma);
  return from_float_plane(plane.height(), plane.width(), resp.plane);
}

BridgeRegularizer::BridgeRegularizer(std::shared_ptr<Client> client, double sigma)
    : client_(std::move(client)), sigma_(sigma) {
  if (!client_) throw BridgeError("bridge regularizer needs a client");
}

PlaneEvaluation BridgeRegularizer::evaluate(const RealPlane& p) const {
  const auto resp = plane_call(*client_, RequestKind::RegularizerGrad, p, sigma_);
  if (!resp.value) throw BridgeError("regularizer-grad response carries no value");
  return {*resp.value, from_float_plane(p.height(), p.width(), resp.plane)};
}

double BridgeRegularizer::value(const RealPlane& p) const { return evaluate(p).value; }

RealPlane BridgeRegularizer::gradient(const RealPlane& p) const { return evaluate(p).gradient; }

std::optional<double> BridgeRegularizer::lipschitz() const {
  const auto resp = client_->capabilities(sigma_);
  if (!resp.ok) return std::nullopt;
  return resp.lipschitz;
}

std::shared_ptr<const PlaneRegularizer> BridgeRegularizer::at_sigma(double sigma) const {
  return std::make_shared<BridgeRegularizer>(client_, sigma);
}

}  // namespace phaseprior::bridge
