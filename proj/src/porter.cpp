// SPDX-License-Identifier: Apache-2.0
//
// Porter stemmer. Mirrors the structure of Martin Porter's reference ANSI C
// implementation, including its two documented departures from the original 1980
// description (bli -> ble and logi -> log in step 2), so that its output agrees
// with the published voc.txt / output.txt pair.

#include <algorithm>
#include <string>
#include <string_view>

#include "llrecall/textprep.hpp"

namespace llrecall {

namespace {

class PorterStemmer {
public:
    explicit PorterStemmer(std::string_view word) : b_(word), k_(static_cast<int>(word.size()) - 1) {}

    std::string run() {
        if (k_ <= 1) return b_;
        step1ab();
        if (k_ > 0) {
            step1c();
            step2();
            step3();
            step4();
            step5();
        }
        return b_.substr(0, static_cast<std::size_t>(k_ + 1));
    }

private:
    std::string b_;
    int k_;      // end of the current stem (inclusive)
    int j_ = 0;  // end of the stem preceding a matched suffix

    bool cons(int i) const {
        switch (b_[i]) {
            case 'a': case 'e': case 'i': case 'o': case 'u': return false;
            case 'y': return i == 0 ? true : !cons(i - 1);
            default: return true;
        }
    }

    // Number of VC sequences in b[0..j].
    int m() const {
        int n = 0;
        int i = 0;
        for (;;) {
            if (i > j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        for (;;) {
            for (;;) {
                if (i > j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            for (;;) {
                if (i > j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool double_consonant(int j) const {
        if (j < 1) return false;
        if (b_[j] != b_[j - 1]) return false;
        return cons(j);
    }

    // consonant-vowel-consonant ending at i, last consonant not w, x or y.
    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        const char ch = b_[i];
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(std::string_view s) {
        const int len = static_cast<int>(s.size());
        if (len > k_ + 1) return false;
        if (std::string_view(b_).substr(static_cast<std::size_t>(k_ - len + 1), s.size()) != s) return false;
        j_ = k_ - len;
        return true;
    }

    void set_to(std::string_view s) {
        b_.replace(static_cast<std::size_t>(j_ + 1), static_cast<std::size_t>(k_ - j_), s);
        k_ = j_ + static_cast<int>(s.size());
    }

    void replace_if_measure(std::string_view s) {
        if (m() > 0) set_to(s);
    }

    void step1ab() {
        if (b_[k_] == 's') {
            if (ends("sses")) {
                k_ -= 2;
            } else if (ends("ies")) {
                set_to("i");
            } else if (b_[k_ - 1] != 's') {
                --k_;
            }
        }
        if (ends("eed")) {
            if (m() > 0) --k_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            if (ends("at")) {
                set_to("ate");
            } else if (ends("bl")) {
                set_to("ble");
            } else if (ends("iz")) {
                set_to("ize");
            } else if (double_consonant(k_)) {
                --k_;
                const char ch = b_[k_];
                if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
            } else if (j_ = k_, m() == 1 && cvc(k_)) {
                set_to("e");
            }
        }
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[k_] = 'i';
    }

    struct Rule {
        std::string_view suffix;
        std::string_view replacement;
    };

    // Applies the first rule whose suffix matches; the replacement is made
    // only when m() > 0, but matching stops at the first suffix hit either way.
    template <std::size_t N>
    void apply_first(const Rule (&rules)[N]) {
        for (const auto& r : rules) {
            if (ends(r.suffix)) {
                replace_if_measure(r.replacement);
                return;
            }
        }
    }

    void step2() {
        switch (b_[k_ - 1]) {
            case 'a': {
                static constexpr Rule r[] = {{"ational", "ate"}, {"tional", "tion"}};
                apply_first(r);
                break;
            }
            case 'c': {
                static constexpr Rule r[] = {{"enci", "ence"}, {"anci", "ance"}};
                apply_first(r);
                break;
            }
            case 'e': {
                static constexpr Rule r[] = {{"izer", "ize"}};
                apply_first(r);
                break;
            }
            case 'l': {
                static constexpr Rule r[] = {
                    {"bli", "ble"}, {"alli", "al"}, {"entli", "ent"}, {"eli", "e"}, {"ousli", "ous"}};
                apply_first(r);
                break;
            }
            case 'o': {
                static constexpr Rule r[] = {{"ization", "ize"}, {"ation", "ate"}, {"ator", "ate"}};
                apply_first(r);
                break;
            }
            case 's': {
                static constexpr Rule r[] = {
                    {"alism", "al"}, {"iveness", "ive"}, {"fulness", "ful"}, {"ousness", "ous"}};
                apply_first(r);
                break;
            }
            case 't': {
                static constexpr Rule r[] = {{"aliti", "al"}, {"iviti", "ive"}, {"biliti", "ble"}};
                apply_first(r);
                break;
            }
            case 'g': {
                static constexpr Rule r[] = {{"logi", "log"}};
                apply_first(r);
                break;
            }
            default: break;
        }
    }

    void step3() {
        switch (b_[k_]) {
            case 'e': {
                static constexpr Rule r[] = {{"icate", "ic"}, {"ative", ""}, {"alize", "al"}};
                apply_first(r);
                break;
            }
            case 'i': {
                static constexpr Rule r[] = {{"iciti", "ic"}};
                apply_first(r);
                break;
            }
            case 'l': {
                static constexpr Rule r[] = {{"ical", "ic"}, {"ful", ""}};
                apply_first(r);
                break;
            }
            case 's': {
                static constexpr Rule r[] = {{"ness", ""}};
                apply_first(r);
                break;
            }
            default: break;
        }
    }

    void step4() {
        switch (b_[k_ - 1]) {
            case 'a':
                if (ends("al")) break;
                return;
            case 'c':
                if (ends("ance") || ends("ence")) break;
                return;
            case 'e':
                if (ends("er")) break;
                return;
            case 'i':
                if (ends("ic")) break;
                return;
            case 'l':
                if (ends("able") || ends("ible")) break;
                return;
            case 'n':
                if (ends("ant") || ends("ement") || ends("ment") || ends("ent")) break;
                return;
            case 'o':
                if (ends("ion") && j_ >= 0 && (b_[j_] == 's' || b_[j_] == 't')) break;
                if (ends("ou")) break;
                return;
            case 's':
                if (ends("ism")) break;
                return;
            case 't':
                if (ends("ate") || ends("iti")) break;
                return;
            case 'u':
                if (ends("ous")) break;
                return;
            case 'v':
                if (ends("ive")) break;
                return;
            case 'z':
                if (ends("ize")) break;
                return;
            default:
                return;
        }
        if (m() > 1) k_ = j_;
    }

    void step5() {
        j_ = k_;
        if (b_[k_] == 'e') {
            const int a = m();
            if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
        }
        if (b_[k_] == 'l' && double_consonant(k_) && m() > 1) --k_;
    }
};

}  // namespace

std::string porter_stem(std::string_view token) {
    const bool alphabetic =
        !token.empty() && std::all_of(token.begin(), token.end(), [](char c) { return c >= 'a' && c <= 'z'; });
    if (!alphabetic) return std::string(token);
    return PorterStemmer(token).run();
}

}  // namespace llrecall
