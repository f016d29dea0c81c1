#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "paramsens/fiber_dissimilarity.hpp"
#include "paramsens/preprocess.hpp"

namespace paramsens {

inline constexpr std::string_view kServiceSchema = "paramsens/1";

struct ServiceResponse {
  int status = 200;
  std::string body;  // JSON
};

/// Read-only queries over a preprocessed study. Safe for concurrent callers.
///
///   /study                            descriptors, plan, per-sample status
///   /matrix[?sort=<characteristic>]   in-out matrix and raw globals
///   /influence?param=&char=[&selected=]
///   /mds
///   /stars[?selected=]                absent: every star; empty: none
///   /spatial[?slice=axis,index]
///   /spatial/result/{id}
///   /fibers/{id}
///   /diff?ref=&other=&fibers=         `other` and `fibers` are comma lists
class QueryService {
 public:
  explicit QueryService(std::shared_ptr<const Analysis> analysis);

  using Query = std::map<std::string, std::string>;
  ServiceResponse handle(std::string_view path, const Query& query) const;

  const Analysis& analysis() const { return *analysis_; }

 private:
  std::shared_ptr<const Analysis> analysis_;
  TubeSampler sampler_;
};

/// HTTP front end (GET only). The service must outlive the server.
class HttpServer {
 public:
  explicit HttpServer(const QueryService& service);
  ~HttpServer();

  /// Port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void run();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace paramsens
