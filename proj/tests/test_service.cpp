#include <doctest.h>

#include <json.hpp>
#include <atomic>
#include <thread>

#include "collection.hpp"
#include "paramsens/digest.hpp"
#include "paramsens/service.hpp"
#include "support.hpp"

// After Eigen: resolv.h defines a _res macro.
#include <httplib.h>

using namespace paramsens;
using nlohmann::json;

namespace {

struct Fixture {
  testing::TempDir dir{"service"};
  std::shared_ptr<const Analysis> analysis;
  std::unique_ptr<QueryService> service;

  Fixture() {
    testing::make_collection(dir.path());
    PreprocessOptions o;
    o.cache_dir = dir / "cache";
    analysis = std::make_shared<const Analysis>(preprocess(dir.path(), o));
    service = std::make_unique<QueryService>(analysis);
  }

  json get(const std::string& path, const QueryService::Query& q = {}, int status = 200) const {
    const auto r = service->handle(path, q);
    CHECK(r.status == status);
    auto body = json::parse(r.body);
    CHECK(body["schema"] == "paramsens/1");
    return body;
  }
};

// Digest over every file of the collection.
std::string tree_digest(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  Sha256 h;
  for (const auto& f : files) h.field(f.string()).field(sha256_file(f));
  return h.hex();
}

}  // namespace

TEST_CASE("service endpoints") {
  const Fixture fx;
  const auto& a = *fx.analysis;
  const auto before = tree_digest(fx.dir.path());

  SUBCASE("study") {
    const auto s = fx.get("/study");
    CHECK(s["parameters"].size() == 2);
    CHECK(s["samples"].size() == a.plan.samples.size());
    CHECK(s["plan"]["stars"] == 2);
  }

  SUBCASE("matrix") {
    const auto m = fx.get("/matrix");
    CHECK(m["parameters"].size() == 2);
    CHECK(m["columns"].size() == 7);
    for (std::size_t c = 0; c < 7; ++c) {
      double mx = 0;
      for (std::size_t r = 0; r < 2; ++r) mx = std::max(mx, m["normalized"][r][c].get<double>());
      CHECK((mx == 1.0 || mx == 0.0));
    }
    CHECK(m["sort"] == "StraightLength");
    CHECK(fx.get("/matrix", {{"sort", "Diameter"}})["sort"] == "Diameter");
    fx.get("/matrix", {{"sort", "Colour"}}, 404);
  }

  SUBCASE("influence") {
    const auto id = std::to_string(a.ok_ids[1]);
    const auto r = fx.get("/influence", {{"param", "param2"}, {"char", "Diameter"}, {"selected", id}});
    CHECK(r["histogram"]["frequencies"].size() == 10);
    CHECK(r["regional"].size() == 4);
    CHECK(r["markers"].size() == 1);
    CHECK(r["markers"][0]["sample_id"] == a.ok_ids[1]);
    fx.get("/influence", {{"param", "nope"}, {"char", "Diameter"}}, 404);
    fx.get("/influence", {{"char", "Diameter"}}, 400);
    fx.get("/influence", {{"param", "param1"}, {"char", "Diameter"}, {"selected", "x"}}, 400);
    fx.get("/influence", {{"param", "param1"}, {"char", "Diameter"}, {"selected", "9999"}}, 404);
  }

  SUBCASE("mds has one point per usable result") {
    CHECK(fx.get("/mds")["points"].size() == a.ok_ids.size());
  }

  SUBCASE("stars") {
    CHECK(fx.get("/stars")["stars"].size() == 2);
    CHECK(fx.get("/stars", {{"selected", ""}})["stars"].empty());
    const auto one = fx.get("/stars", {{"selected", "0"}});
    REQUIRE(one["stars"].size() == 1);
    CHECK(one["stars"][0]["star_id"] == a.plan.samples[0].star_id);
    CHECK(one["stars"][0]["branches"].size() == 2);
  }

  SUBCASE("spatial") {
    const auto s = fx.get("/spatial", {{"slice", "z,8"}});
    CHECK(s["values"].size() == 16);
    CHECK(s["values"][0].size() == 16);
    fx.get("/spatial", {{"slice", "w,1"}}, 400);
    fx.get("/spatial", {{"slice", "z,99"}}, 400);
    fx.get("/spatial", {{"slice", "z"}}, 400);
    const auto r = fx.get("/spatial/result/" + std::to_string(a.ok_ids[0]));
    CHECK_FALSE(r["voxels"].empty());
    fx.get("/spatial/result/9999", {}, 404);
  }

  SUBCASE("fibers") {
    const auto f = fx.get("/fibers/0");
    CHECK(f["fibers"].size() == 12);
    CHECK(f["fibers"][0]["characteristics"].contains("StraightLength"));
    fx.get("/fibers/abc", {}, 400);
    fx.get("/fibers/9999", {}, 404);
  }

  SUBCASE("self diff is empty") {
    const auto d = fx.get("/diff", {{"ref", "0"}, {"other", "0"}, {"fibers", "1"}});
    const auto& pair = d["comparisons"][0]["pairs"][0];
    CHECK(pair["match"] == 1);
    CHECK(pair["s"] == 0.0);
    CHECK(pair["only_ref"].empty());
    CHECK(pair["only_other"].empty());
  }

  SUBCASE("diff against another result") {
    const auto d = fx.get("/diff", {{"ref", "0"}, {"other", "1,2"}, {"fibers", "0,3"}});
    CHECK(d["comparisons"].size() == 2);
    CHECK(d["comparisons"][0]["pairs"].size() == 2);
    fx.get("/diff", {{"ref", "0"}, {"other", "1"}, {"fibers", "500"}}, 404);
    fx.get("/diff", {{"ref", "0"}, {"fibers", "1"}}, 400);
  }

  SUBCASE("unknown endpoint") { fx.get("/nothing", {}, 404); }

  CHECK(tree_digest(fx.dir.path()) == before);
}

TEST_CASE("http front end") {
  const Fixture fx;
  HttpServer server(*fx.service);
  const int port = server.bind("127.0.0.1", 0);
  std::thread worker([&] { server.run(); });
  while (!server.running()) std::this_thread::yield();

  httplib::Client client("127.0.0.1", port);
  const auto ok = client.Get("/mds");
  REQUIRE(ok);
  CHECK(ok->status == 200);
  CHECK(json::parse(ok->body)["points"].size() == fx.analysis->ok_ids.size());

  const auto stars = client.Get("/stars?selected=");
  REQUIRE(stars);
  CHECK(json::parse(stars->body)["stars"].empty());

  const auto missing = client.Get("/fibers/4242");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  const auto post = client.Post("/study", "", "text/plain");
  REQUIRE(post);
  CHECK(post->status >= 400);

  server.stop();
  worker.join();
}

TEST_CASE("concurrent queries agree") {
  const Fixture fx;
  const std::vector<std::string> paths{"/matrix", "/mds", "/stars", "/fibers/0", "/spatial"};
  std::map<std::string, std::string> expected;
  for (const auto& p : paths) expected[p] = fx.service->handle(p, {}).body;

  std::atomic<int> mismatches{0};
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < 4; ++t) {
      pool.emplace_back([&, t] {
        for (int i = 0; i < 20; ++i) {
          const auto& p = paths[(t + i) % paths.size()];
          if (fx.service->handle(p, {}).body != expected.at(p)) ++mismatches;
        }
      });
    }
  }
  CHECK(mismatches == 0);
}
