#include "cbrpsim/mobility.h"

#include "doctest.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

using namespace cbrpsim;

TEST_SUITE("mobility")
{
    TEST_CASE("position along a hand-built leg")
    {
        WaypointLeg leg;
        leg.origin = {0, 0};
        leg.destination = {100, 0};
        leg.speed = 10;
        leg.depart_time = 3;
        leg.arrive_time = 13;
        leg.pause_until = 15;
        CHECK(PositionAt(leg, 3).x == 0.0);
        const auto mid = PositionAt(leg, 8);
        CHECK(mid.x == doctest::Approx(50.0));
        CHECK(mid.y == doctest::Approx(0.0));
        CHECK(PositionAt(leg, 13).x == doctest::Approx(100.0));
        CHECK(PositionAt(leg, 14).x == 100.0);
        CHECK(PositionAt(leg, 15).x == 100.0);
        CHECK_THROWS_AS(PositionAt(leg, 2.9), std::out_of_range);
        CHECK_THROWS_AS(PositionAt(leg, 15.1), std::out_of_range);
    }

    TEST_CASE("next leg contract")
    {
        ScenarioConfig c;
        c.area_width = 500;
        c.area_height = 300;
        c.max_speed = 20;
        std::mt19937_64 rng(5);
        Position at{250, 150};
        Time now = 0;
        for (int i = 0; i < 2000; ++i)
        {
            const auto leg = NextLeg(at, now, c, rng);
            CHECK(leg.depart_time == now);
            CHECK(leg.origin.x == at.x);
            CHECK(leg.speed >= c.min_speed);
            CHECK(leg.speed <= c.max_speed);
            CHECK(leg.destination.x >= 0.0);
            CHECK(leg.destination.x <= 500.0);
            CHECK(leg.destination.y >= 0.0);
            CHECK(leg.destination.y <= 300.0);
            CHECK(leg.arrive_time ==
                  doctest::Approx(now + Distance(leg.origin, leg.destination) / leg.speed));
            CHECK(leg.pause_until == leg.arrive_time);
            at = leg.destination;
            now = leg.pause_until;
        }
    }

    TEST_CASE("pause and degenerate speed interval")
    {
        ScenarioConfig c;
        c.min_speed = 7.5;
        c.max_speed = 7.5;
        c.pause_time = 4;
        std::mt19937_64 rng(1);
        const auto leg = NextLeg({10, 10}, 2, c, rng);
        CHECK(leg.speed == 7.5);
        CHECK(leg.pause_until == doctest::Approx(leg.arrive_time + 4));
    }

    TEST_CASE("zero-length leg")
    {
        WaypointLeg leg;
        leg.origin = leg.destination = {5, 5};
        leg.speed = 1;
        leg.depart_time = leg.arrive_time = leg.pause_until = 2;
        CHECK(PositionAt(leg, 2).x == 5.0);
    }

    TEST_CASE("stationary leg never ends")
    {
        const auto leg = StationaryLeg({4, 9}, 1.0);
        CHECK(PositionAt(leg, 1e9).y == 9.0);
        CHECK(std::isinf(leg.pause_until));
    }

    TEST_CASE("track continuity, speed bound and area bound")
    {
        ScenarioConfig c;
        c.area_width = 400;
        c.area_height = 400;
        c.max_speed = 30;
        for (std::uint32_t seed = 0; seed < 20; ++seed)
        {
            MobilityTrack track({200, 200}, c, MakeRng(seed, RngStream::Mobility));
            Time t = 0;
            for (int k = 0; k < 30; ++k)
            {
                const auto& leg = track.CurrentLeg();
                for (double s = t; s <= leg.pause_until; s += 0.37)
                {
                    const auto p = track.PositionAt(s);
                    CHECK(p.x >= 0.0);
                    CHECK(p.x <= 400.0);
                    CHECK(p.y >= 0.0);
                    CHECK(p.y <= 400.0);
                }
                const Time end = leg.pause_until;
                const auto endPos = track.PositionAt(end);
                const auto& next = track.Advance(end);
                const auto startPos = PositionAt(next, end);
                CHECK(startPos.x == doctest::Approx(endPos.x));
                CHECK(startPos.y == doctest::Approx(endPos.y));
                const double dt = 0.25;
                const auto a = PositionAt(next, end);
                const auto b = PositionAt(next, std::min(end + dt, next.pause_until));
                CHECK(Distance(a, b) <= c.max_speed * dt + 1e-9);
                t = end;
            }
        }
    }

    TEST_CASE("advance requires the leg end")
    {
        ScenarioConfig c;
        MobilityTrack track({1, 1}, c, MakeRng(0, RngStream::Mobility));
        CHECK_THROWS(track.Advance(track.CurrentLeg().pause_until + 1.0));
    }

    TEST_CASE("trace export")
    {
        ScenarioConfig c;
        std::vector<MobilityTrack> tracks;
        tracks.emplace_back(Position{1, 2}, c, MakeRng(0, RngStream::Mobility));
        tracks.emplace_back(Position{3, 4}, c, MakeRng(0, RngStream::Mobility, 1));
        std::ostringstream out;
        WriteMobilityTrace(out, tracks, 10.0, 5.0);
        const auto text = out.str();
        CHECK(text.rfind("time,node_id,x,y\n", 0) == 0);
        std::size_t lines = 0;
        for (char ch : text)
        {
            lines += ch == '\n';
        }
        CHECK(lines == 1 + 3 * 2);
    }
}
