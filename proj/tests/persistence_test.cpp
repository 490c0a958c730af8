#include <rehab/persistence.hpp>

#include "record_gen.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>

using namespace rehab;
using rehab::testing::random_record;
using rehab::testing::TempDir;

namespace {

StoreError::Kind error_kind(const std::function<void()>& f) {
    try {
        f();
    } catch (const StoreError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no StoreError thrown";
    return StoreError::Kind::StoreUnwritable;
}

SessionRecord empty_record(std::int64_t created) {
    SessionRecord r;
    r.created_at_us = created;
    r.session_id = new_session_id(created);
    return r;
}

// Runs save() in a child that dies at `point`; returns the child's exit status.
int crash_during_save(const SessionStore& store, const SessionRecord& r, std::string_view point) {
    const pid_t pid = ::fork();
    if (pid == 0) {
        SessionStore dying(store.root(), [point](std::string_view at) {
            if (at == point) ::_exit(42);
        });
        try {
            dying.save(r);
        } catch (...) {
            ::_exit(1);
        }
        ::_exit(0);
    }
    int status = 0;
    ::waitpid(pid, &status, 0);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(SessionStore, SaveThenLoadIsIdentity) {
    TempDir dir;
    SessionStore store(dir.path());
    std::mt19937_64 gen(3);
    for (int i = 0; i < 100; ++i) {
        auto r = random_record(gen, i);
        ASSERT_EQ(store.save(r), r.session_id);
        ASSERT_EQ(store.load(r.session_id), r);
    }
}

TEST(SessionStore, EmptySessionLoadsWithAbsentMetrics) {
    TempDir dir;
    SessionStore store(dir.path());
    auto r = empty_record(5);
    store.save(r);
    auto back = store.load(r.session_id);
    EXPECT_EQ(back.metrics.n_drops, 0);
    EXPECT_FALSE(back.metrics.hit_rate);
    EXPECT_FALSE(back.metrics.accuracy_mre);
}

TEST(SessionStore, DuplicateIdIsRejected) {
    TempDir dir;
    SessionStore store(dir.path());
    auto r = empty_record(1);
    store.save(r);
    EXPECT_EQ(error_kind([&] { store.save(r); }), StoreError::Kind::DuplicateId);
}

TEST(SessionStore, DeleteThenLoadIsNotFound) {
    TempDir dir;
    SessionStore store(dir.path());
    auto r = empty_record(1);
    store.save(r);
    store.remove(r.session_id);
    EXPECT_EQ(error_kind([&] { store.load(r.session_id); }), StoreError::Kind::NotFound);
    EXPECT_EQ(error_kind([&] { store.remove(r.session_id); }), StoreError::Kind::NotFound);
    EXPECT_TRUE(store.list().empty());
}

TEST(SessionStore, ListIsInCreationOrder) {
    TempDir dir;
    SessionStore store(dir.path());
    EXPECT_TRUE(store.list().empty());
    auto later = empty_record(200), earlier = empty_record(100);
    store.save(later);
    store.save(earlier);
    auto list = store.list();
    ASSERT_EQ(list.size(), 2u);
    EXPECT_EQ(list[0].session_id, earlier.session_id);
    EXPECT_EQ(list[1].session_id, later.session_id);
    EXPECT_EQ(list[0].n_drops, 0);
}

TEST(SessionStore, MissingStoreListsEmpty) {
    TempDir dir;
    EXPECT_TRUE(SessionStore(dir / "nope").list().empty());
}

TEST(SessionStore, RejectsPathLikeIds) {
    TempDir dir;
    SessionStore store(dir.path());
    auto r = empty_record(1);
    r.session_id = "../escape";
    EXPECT_EQ(error_kind([&] { store.save(r); }), StoreError::Kind::InvalidId);
    EXPECT_EQ(error_kind([&] { store.load("../escape"); }), StoreError::Kind::NotFound);
}

TEST(SessionStore, UnwritableRootIsReported) {
    TempDir dir;
    rehab::testing::write_text(dir / "file", "x");
    SessionStore store(dir / "file" / "sub");
    EXPECT_EQ(error_kind([&] { store.save(empty_record(1)); }), StoreError::Kind::StoreUnwritable);
}

TEST(SessionStore, TruncatedRecordIsCorrupt) {
    TempDir dir;
    SessionStore store(dir.path());
    std::mt19937_64 gen(8);
    auto r = random_record(gen, 0);
    while (r.drops.empty()) r = random_record(gen, 0);
    const std::string full = encode_record(r);
    rehab::testing::write_text(dir / r.session_id, full.substr(0, full.rfind('\n', full.size() - 2) + 1));
    EXPECT_EQ(error_kind([&] { store.load(r.session_id); }), StoreError::Kind::CorruptRecord);
}

TEST(SessionStore, SchemaMismatchIsReported) {
    TempDir dir;
    SessionStore store(dir.path());
    auto r = empty_record(1);
    r.schema_version = 99;
    rehab::testing::write_text(dir / r.session_id, encode_record(r));
    EXPECT_EQ(error_kind([&] { store.load(r.session_id); }), StoreError::Kind::SchemaMismatch);
}

TEST(SessionStore, TamperedMetricsAreCorrupt) {
    TempDir dir;
    SessionStore store(dir.path());
    auto r = empty_record(1);
    r.metrics.hit_rate = 1.0;
    rehab::testing::write_text(dir / r.session_id, encode_record(r));
    EXPECT_EQ(error_kind([&] { store.load(r.session_id); }), StoreError::Kind::CorruptRecord);
}

TEST(SessionStoreCrash, DeathAtAnyPointLeavesOldOrNewState) {
    std::mt19937_64 gen(21);
    for (std::string_view point : {"partial_write", "before_publish"}) {
        TempDir dir;
        SessionStore store(dir.path());
        const auto old = random_record(gen, 0);
        store.save(old);
        const auto fresh = random_record(gen, 1);

        ASSERT_EQ(crash_during_save(store, fresh, point), 42) << point;
        EXPECT_EQ(error_kind([&] { store.load(fresh.session_id); }), StoreError::Kind::NotFound) << point;
        ASSERT_EQ(store.load(old.session_id), old);
        auto list = store.list();
        ASSERT_EQ(list.size(), 1u);
        EXPECT_EQ(list[0].session_id, old.session_id);

        // Leftover temp files must not block a later save of the same record.
        store.save(fresh);
        EXPECT_EQ(store.load(fresh.session_id), fresh);
    }
}

TEST(SessionStoreCrash, CompletedSaveIsFullyVisible) {
    TempDir dir;
    SessionStore store(dir.path());
    std::mt19937_64 gen(4);
    const auto r = random_record(gen, 0);
    ASSERT_EQ(crash_during_save(store, r, "never"), 0);
    EXPECT_EQ(store.load(r.session_id), r);
}

TEST(SessionId, FormatSortsByCreationTime) {
    const auto a = new_session_id(9), b = new_session_id(10);
    EXPECT_TRUE(valid_session_id(a));
    EXPECT_EQ(a.size(), 25u);
    EXPECT_LT(a.substr(0, 16), b.substr(0, 16));
    EXPECT_FALSE(valid_session_id(".hidden"));
    EXPECT_FALSE(valid_session_id("a/b"));
    EXPECT_FALSE(valid_session_id(""));
}
