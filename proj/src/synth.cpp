#include "revex/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "revex/error.hpp"
#include "revex/rng.hpp"

namespace revex {

namespace {

struct AttributeText {
    const char* name;
    std::array<const char*, 3> positive;
    std::array<const char*, 3> negative;
};

const AttributeText kAttributes[] = {
    {"location",
     {"Great location, right next to the old town.", "The location was perfect for walking everywhere.",
      "Great location close to the station and the river."},
     {"The location is far from everything we wanted to see.", "Location was inconvenient, taxis every day.",
      "The neighborhood felt unsafe at night."}},
    {"cleanliness",
     {"The room was spotless and very clean.", "Everything was clean and freshly cleaned every day.",
      "Very clean hotel, even the carpet looked new."},
     {"The carpet was stained and smelled musty.", "Dust everywhere and the carpet was dirty.",
      "The room was not clean when we arrived."}},
    {"service",
     {"The service was excellent from start to finish.", "Friendly service at the front desk and the bar.",
      "Room service was quick and the service overall was attentive."},
     {"The service was slow and nobody seemed to care.", "Terrible service at the restaurant.",
      "We waited an hour for room service, poor service."}},
    {"staff",
     {"The staff were friendly and helpful.", "Staff went out of their way to help us.",
      "Lovely staff who remembered our names."},
     {"The staff were rude at check in.", "Unhelpful staff ignored our requests.",
      "Staff seemed annoyed by every question."}},
    {"room",
     {"Our room was spacious and comfortable.", "The room was large with a nice desk.",
      "Lovely room with plenty of space for our bags."},
     {"The room was tiny and cramped.", "Our room was dark and the window did not open.",
      "The room felt old and worn out."}},
    {"bed",
     {"The bed was very comfortable.", "Comfortable bed and soft pillows.", "We slept well, the bed was great."},
     {"The bed was hard and uncomfortable.", "Lumpy bed and thin pillows.", "The bed creaked all night."}},
    {"bathroom",
     {"The bathroom was modern with a great shower.", "Nice bathroom with good water pressure.",
      "The bathroom was bright and well stocked."},
     {"The bathroom had mold in the shower.", "The shower was cold and the bathroom tiny.",
      "Broken bathroom fan and a leaking sink."}},
    {"breakfast",
     {"Breakfast was delicious with lots of choice.", "Excellent breakfast buffet every morning.",
      "Fresh pastries and good coffee at breakfast."},
     {"Breakfast was overpriced and bland.", "The breakfast buffet ran out of food early.",
      "Cold eggs and stale bread at breakfast."}},
    {"food",
     {"The food at the restaurant was tasty and the portion size was generous.",
      "Delicious food, generous portion size.", "The dinner menu was excellent."},
     {"The food was bland and the portion size was small.", "Disappointing food, tiny portion size.",
      "The restaurant food was overpriced."}},
    {"drink",
     {"Great cocktails at the rooftop bar.", "The bar had a nice wine list.", "Free drinks at happy hour were a treat."},
     {"Drinks at the bar were watered down.", "The bar was overpriced for small drinks.",
      "The minibar drinks were warm."}},
    {"price",
     {"Good value for the price.", "Reasonable price for such a central hotel.", "Affordable and worth every penny."},
     {"Way too expensive for what you get.", "The price was not worth it.", "Hidden fees made it very expensive."}},
    {"wifi",
     {"Fast wifi throughout the building.", "The wifi worked perfectly for video calls.", "Free and reliable wifi."},
     {"The wifi kept dropping.", "Slow wifi, barely usable.", "Wifi only worked in the lobby."}},
    {"parking",
     {"Easy parking in the garage.", "Free parking right outside.", "Convenient parking with valet service."},
     {"Parking was expensive and far away.", "No parking available nearby.", "The parking garage was a nightmare."}},
    {"noise",
     {"Quiet room, we slept soundly.", "Very quiet at night despite the city.", "Peaceful and quiet hotel."},
     {"Noisy street traffic all night.", "The walls are thin and noisy neighbors kept us awake.",
      "Construction noise started at seven."}},
    {"view",
     {"Amazing view of the harbor.", "The view from our balcony was stunning.", "Beautiful view of the mountains."},
     {"The view was a brick wall.", "No view at all, just a parking lot.", "Our window faced a noisy alley."}},
    {"pool",
     {"The pool was warm and clean.", "Lovely rooftop pool.", "Kids loved the pool."},
     {"The pool was closed during our stay.", "Tiny pool and always crowded.", "The pool was dirty."}},
    {"gym",
     {"Well equipped gym open all day.", "The gym was modern and clean.", "Nice gym with new machines."},
     {"The gym had broken machines.", "Tiny gym with two treadmills.", "The gym was closed for repairs."}},
    {"facility",
     {"Great facilities including a spa and a lounge.", "The facilities were modern.", "Excellent conference facilities."},
     {"The facilities were outdated.", "Elevator broken for days.", "Old facilities in need of renovation."}},
    {"check-in",
     {"Check in was quick and easy.", "Smooth check in and early access to the room.", "Fast check in at midnight."},
     {"Check in took almost an hour.", "The check in line was very long.", "Our reservation was lost at check in."}},
    {"decor",
     {"Stylish decor and lovely art.", "Beautiful decor in the lobby.", "The decor was charming and modern."},
     {"The decor was dated and tired.", "Ugly decor and faded curtains.", "Tacky decor everywhere."}},
    {"general",
     {"We would definitely stay here again.", "Overall a wonderful stay.", "Highly recommend this hotel."},
     {"We will not come back.", "Overall a disappointing stay.", "Would not recommend this hotel."}},
};

constexpr const char* kFillers[] = {
    "We stayed for three nights.", "We visited for a wedding.", "It was our first trip to the city.",
    "We booked through the website.", "We traveled with two kids.", "I was here on a business trip.",
};

constexpr const char* kNameParts[] = {"Harbor", "Grand", "Royal", "Garden", "Central", "River",  "Park",
                                      "Plaza",  "Bay",   "Hill",  "Lake",   "Station", "Market", "Summit"};
constexpr const char* kNameKinds[] = {"Hotel", "Inn", "Suites", "Lodge", "Resort"};

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

std::string two_digits(std::size_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%02zu", v);
    return buf;
}

}  // namespace

SynthCorpus generate_corpus(const SynthOptions& options) {
    if (options.entities == 0) throw ValidationError("synth needs at least one entity");
    Rng rng(options.seed);
    SynthCorpus out;
    constexpr std::size_t n_attr = std::size(kAttributes);
    for (const auto& a : kAttributes) out.schema.attributes.emplace_back(a.name);

    // Each entity has a latent quality per attribute and a popularity weight.
    std::vector<std::array<double, n_attr>> quality(options.entities);
    std::vector<double> weight(options.entities);
    for (std::size_t e = 0; e < options.entities; ++e) {
        Entity ent;
        ent.id = "h" + two_digits(e + 1);
        ent.name = std::string(kNameParts[rng.index(std::size(kNameParts))]) + " " +
                   kNameParts[rng.index(std::size(kNameParts))] + " " + kNameKinds[e % std::size(kNameKinds)];
        if (e % 6 != 5) ent.coordinates = Coordinates{round3(40.0 + 2.0 * rng.uniform()), round3(-74.0 + 2.0 * rng.uniform())};
        if (e % 4 == 0) ent.address = std::to_string(10 + e) + " Main Street";
        out.entities.push_back(std::move(ent));
        for (auto& q : quality[e]) q = 1.6 * rng.uniform() - 0.8;
        weight[e] = 1.0 / std::pow(static_cast<double>(e + 1), 0.7);
    }
    std::vector<double> cumulative(weight.size());
    std::partial_sum(weight.begin(), weight.end(), cumulative.begin());

    for (std::size_t i = 0; i < options.reviews; ++i) {
        const double pick = rng.uniform() * cumulative.back();
        const std::size_t e = static_cast<std::size_t>(
            std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin());
        const std::size_t entity = std::min(e, options.entities - 1);

        Review r;
        r.id = "r" + std::to_string(i + 1);
        r.entity_id = i % 397 == 396 ? "h99" : out.entities[entity].id;  // a few point at an unlisted hotel

        // 2-5 distinct attributes
        std::array<std::size_t, n_attr> order{};
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(std::span<std::size_t>(order));
        const std::size_t mentions = 2 + rng.index(4);
        std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(mentions));

        std::string text;
        if (rng.uniform() < 0.3) text = kFillers[rng.index(std::size(kFillers))];
        double score_sum = 0.0;
        for (std::size_t m = 0; m < mentions; ++m) {
            const std::size_t a = order[m];
            const double drift = quality[entity][a] + 0.5 * rng.normal();
            const double magnitude = 0.3 + 0.7 * rng.uniform();
            const double score = round3(std::clamp(drift >= 0.0 ? magnitude : -magnitude, -1.0, 1.0));
            const auto& tpl = score >= 0.0 ? kAttributes[a].positive : kAttributes[a].negative;
            if (!text.empty()) text += ' ';
            text += tpl[rng.index(tpl.size())];
            out.extractions.push_back({r.id, kAttributes[a].name, score});
            if (rng.uniform() < 0.02) {
                const double second = round3(std::clamp(score + 0.2 * rng.normal(), -1.0, 1.0));
                out.extractions.push_back({r.id, kAttributes[a].name, second});
            }
            score_sum += score;
        }
        const double mean = score_sum / static_cast<double>(mentions);
        r.rating = std::clamp(std::round(3.0 + 2.0 * mean), 1.0, 5.0);
        r.date = std::to_string(2017 + i % 4) + "-" + two_digits(1 + rng.index(12)) + "-" + two_digits(1 + rng.index(28));
        r.text = std::move(text);
        out.reviews.push_back(std::move(r));
    }
    return out;
}

void write_corpus(const std::filesystem::path& dir, const SynthCorpus& corpus) {
    std::filesystem::create_directories(dir);
    write_reviews_jsonl(dir / "reviews.jsonl", corpus.reviews);
    write_entities_jsonl(dir / "entities.jsonl", corpus.entities);
    write_file(dir / "schema.txt", format_schema(corpus.schema));
    write_extractions_jsonl(dir / "extractions.jsonl", corpus.extractions);
    write_file(dir / "config.txt",
               "# generated by `revex synth`\n"
               "reviews = reviews.jsonl\n"
               "entities = entities.jsonl\n"
               "schema = schema.txt\n"
               "extractions = extractions.jsonl\n"
               "index_dir = index\n"
               "featurizer = extractions\n"
               "k1 = 5\n"
               "k2 = 3\n"
               "depth = 5\n"
               "seed = 42\n");
}

}  // namespace revex
