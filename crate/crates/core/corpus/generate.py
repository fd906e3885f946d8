#!/usr/bin/env python3
"""Regenerates the bundled simulated-app corpus (*.json in this directory).

Every screen gets a unique root tag so screens are structurally distinct, a
toolbar, a content area and a button bar. Navigation bindings live on the
button bar unless a screen wires something else (list rows, web elements).

    python3 crates/core/corpus/generate.py
"""

import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))


def leaf(tag):
    return {"tag": tag}


def node(tag, *children):
    return {"tag": tag, "children": list(children)} if children else {"tag": tag}


def lst(tag, *rows):
    return {"tag": tag, "kind": "list_container", "children": list(rows)}


def web(tag, markup):
    return {"tag": tag, "kind": "web_container", "markup": markup}


def camel(screen_id):
    return "".join(p.capitalize() for p in screen_id.split("_")) + "Page"


DEFAULT_BODY = [leaf("TextView"), leaf("ImageView"), node("LinearLayout", leaf("TextView"), leaf("TextView"))]


def screen(screen_id, nav=(), body=None, extra=()):
    """nav: list of effects bound (tap) to ButtonBar children in order.
    extra: list of (path-within-content, action, effect) bindings."""
    body = DEFAULT_BODY if body is None else body
    buttons = [leaf("Button") for _ in nav] or [leaf("Space")]
    tree = node(
        camel(screen_id),
        node("Toolbar", leaf("ImageButton"), leaf("TextView")),
        node("Content", *body),
        node("ButtonBar", *buttons),
    )
    bindings = [{"path": [2, i], "action": "tap", "effect": eff} for i, eff in enumerate(nav)]
    for path, action, eff in extra:
        bindings.append({"path": [1] + list(path), "action": action, "effect": eff})
    return {"id": screen_id, "tree": tree, "bindings": bindings}


def goto(s):
    return {"goto": s}


def activity(name, token, *screens):
    return {"name": name, "intent_token": token, "screens": list(screens)}


def app(name, seed, entry, activities, noise=()):
    return {
        "name": name,
        "seed": seed,
        "entry_activity": entry,
        "activities": activities,
        "noise_rules": list(noise),
    }


def news_row():
    return node("NewsRow", leaf("ImageView"), leaf("TextView"), leaf("TextView"))


def newsreader():
    feed_body = [lst("ListView", *[news_row() for _ in range(4)]), leaf("ProgressBar")]
    results_body = [lst("ListView", *[node("ResultRow", leaf("TextView"), leaf("TextView")) for _ in range(3)]), leaf("TextView")]
    comments_body = [lst("ListView", *[node("CommentRow", leaf("ImageView"), leaf("TextView")) for _ in range(5)]), leaf("EditText")]
    return app(
        "newsreader",
        7,
        "MainActivity",
        [
            activity(
                "MainActivity",
                "main",
                screen("feed", [goto("categories"), goto("search"), goto("settings")], feed_body,
                       extra=[([0, 0], "tap", goto("article")), ([1], "long_tap", "noop")]),
                screen("categories", [goto("feed"), goto("search")],
                       [lst("ListView", leaf("CheckedTextView"), leaf("CheckedTextView")), leaf("TextView"), leaf("ImageView")]),
                screen("search", [goto("search_results")],
                       [leaf("EditText"), leaf("TextView"), node("ChipGroup", leaf("Chip"), leaf("Chip"), leaf("Chip"))],
                       extra=[([0], "type_text", "noop")]),
                screen("search_results", [goto("feed")], results_body,
                       extra=[([0, 0], "tap", goto("article"))]),
            ),
            activity(
                "ArticleActivity",
                "article",
                screen("article", [goto("comments"), goto("share_sheet"), goto("gallery"), goto("feed")],
                       [leaf("TextView"), leaf("ImageView"), node("ScrollView", leaf("TextView"), leaf("TextView"), leaf("TextView"))],
                       extra=[([2], "scroll", "noop")]),
                screen("comments", [goto("article")], comments_body, extra=[([1], "type_text", "noop")]),
                screen("share_sheet", [goto("article")],
                       [node("GridView", leaf("ImageButton"), leaf("ImageButton"), leaf("ImageButton")), leaf("TextView")]),
                screen("gallery", [goto("article")],
                       [node("ViewPager", leaf("ImageView")), leaf("TextView"), leaf("TextView")]),
            ),
            activity(
                "SettingsActivity",
                "settings",
                screen("settings", [goto("notification_settings"), goto("about"), goto("feed")],
                       [node("PreferenceList", leaf("Switch"), leaf("Switch"), leaf("TextView"))]),
                screen("notification_settings", [goto("settings")],
                       [leaf("Switch"), leaf("Switch"), leaf("Switch"), leaf("SeekBar")],
                       extra=[([0], "long_tap", "noop"), ([3], "scroll", "noop")]),
                screen("about", [goto("licenses"), goto("settings")],
                       [leaf("ImageView"), leaf("TextView"), leaf("TextView"), leaf("TextView")]),
                screen("licenses", [goto("about")],
                       [node("ScrollView", leaf("TextView"), leaf("TextView")), leaf("TextView")]),
            ),
        ],
        noise=[{"kind": "duplicate_list_row", "probability": 0.5, "target_path": [1, 0]}],
    )


def profile():
    crash_body = [node("CrashDialog", leaf("TextView"), leaf("TextView"), leaf("Button")), leaf("ImageView")]
    return app(
        "profile",
        11,
        "DashboardActivity",
        [
            activity(
                "DashboardActivity",
                "dashboard",
                screen("dashboard", [goto("account_menu")],
                       [node("TileGrid", leaf("StepsTile"), leaf("SleepTile"), leaf("HeartTile")), leaf("TextView")],
                       extra=[([0, 0], "tap", "noop")]),
            ),
            activity(
                "AccountActivity",
                "account",
                screen("account_menu", [goto("profile"), goto("settings")],
                       [leaf("ImageView"), leaf("TextView"), leaf("TextView")]),
            ),
            activity(
                "ProfileActivity",
                "profile",
                screen("profile", [goto("photo_picker"), goto("badges")],
                       [leaf("ImageView"), leaf("TextView"), node("StatsRow", leaf("TextView"), leaf("TextView"))]),
                screen("photo_picker", [goto("profile")], crash_body),
                screen("badges", [goto("profile")],
                       [lst("GridView", leaf("BadgeView"), leaf("BadgeView"), leaf("BadgeView")), leaf("TextView")]),
            ),
            activity(
                "SettingsActivity",
                "settings",
                screen("settings", [goto("privacy"), goto("devices")],
                       [node("PreferenceList", leaf("TextView"), leaf("Switch"))]),
                screen("privacy", [goto("settings")],
                       [leaf("Switch"), leaf("Switch"), leaf("TextView"), leaf("TextView")]),
                screen("devices", [goto("settings")],
                       [lst("ListView", node("DeviceRow", leaf("ImageView"), leaf("TextView"))), leaf("Button")]),
            ),
        ],
    )


def flaky():
    return app(
        "flaky",
        5,
        "MainActivity",
        [
            activity(
                "MainActivity",
                "main",
                screen("home", [{"goto_until_restart": "promo"}, goto("catalog"), goto("about")]),
                screen("catalog", [goto("category"), goto("home")],
                       [lst("ListView", leaf("TextView"), leaf("TextView")), leaf("ImageView"), leaf("TextView")]),
                screen("category", [goto("promo"), goto("catalog")],
                       [lst("GridView", leaf("ImageView"), leaf("ImageView")), leaf("TextView"), leaf("TextView")]),
            ),
            activity(
                "PromoActivity",
                "promo",
                screen("promo", [goto("promo_terms")],
                       [leaf("ImageView"), leaf("TextView"), leaf("TextView"), leaf("TextView")]),
                screen("promo_terms", [goto("promo")],
                       [node("ScrollView", leaf("TextView"), leaf("TextView")), leaf("CheckBox")]),
            ),
            activity(
                "InfoActivity",
                "info",
                screen("about", [goto("home")],
                       [leaf("ImageView"), leaf("TextView"), node("LinearLayout", leaf("TextView"))]),
            ),
        ],
    )


MESSAGE_MARKUP = (
    "<html><body><div class='header'><h1>Subject</h1><p>From</p></div>"
    "<div class='body'><p>Hello</p><p>World</p><img src='x.png'/></div>"
    "<a href='#attachments'>Attachments</a><a href='#reply'>Reply</a></body></html>"
)
HELP_MARKUP = (
    "<html><body><nav><a href='#faq'>FAQ</a><a href='#contact'>Contact</a></nav>"
    "<section><h2>Help</h2><p>Text</p><ul><li/><li/><li/></ul></section></body></html>"
)


def webmail():
    # Web element paths (inside Content[0] = the WebView):
    # html[0] > body[0] > (div, div, a, a) ; the two links are body children 2 and 3.
    return app(
        "webmail",
        13,
        "InboxActivity",
        [
            activity(
                "InboxActivity",
                "inbox",
                screen("inbox", [goto("compose"), goto("folders"), goto("account")],
                       [lst("ListView", *[node("MailRow", leaf("TextView"), leaf("TextView"), leaf("ImageView")) for _ in range(6)]),
                        leaf("FloatingActionButton")],
                       extra=[([0, 0], "tap", goto("message"))]),
                screen("compose", [goto("inbox")],
                       [leaf("EditText"), leaf("EditText"), leaf("EditText"), leaf("TextView")],
                       extra=[([0], "type_text", "noop"), ([2], "type_text", "noop")]),
                screen("folders", [goto("inbox")],
                       [lst("ListView", node("FolderRow", leaf("ImageView"), leaf("TextView"))), leaf("TextView")]),
            ),
            activity(
                "MessageActivity",
                "message",
                screen("message", [goto("inbox")], [web("WebView", MESSAGE_MARKUP), leaf("TextView")],
                       extra=[([0, 0, 0, 2], "tap", goto("attachments")), ([0, 0, 0, 3], "tap", goto("reply"))]),
                screen("attachments", [goto("message")],
                       [lst("ListView", node("AttachmentRow", leaf("ImageView"), leaf("TextView"))), leaf("TextView"), leaf("ImageView")]),
                screen("reply", [goto("message")],
                       [leaf("EditText"), leaf("TextView"), node("LinearLayout", leaf("CheckBox"), leaf("TextView"))],
                       extra=[([0], "type_text", "noop")]),
            ),
            activity(
                "AccountActivity",
                "account",
                screen("account", [goto("signatures"), goto("web_help"), goto("inbox")]),
                screen("signatures", [goto("account")],
                       [leaf("EditText"), leaf("Switch"), leaf("TextView"), leaf("TextView")],
                       extra=[([0], "type_text", "noop")]),
                screen("web_help", [goto("account")], [web("WebView", HELP_MARKUP), leaf("TextView")],
                       extra=[([0, 0, 0, 0, 0], "tap", goto("faq")), ([0, 0, 0, 0, 1], "tap", goto("contact"))]),
                screen("faq", [goto("web_help")],
                       [node("ExpandableListView", leaf("TextView"), leaf("TextView"), leaf("TextView")), leaf("ImageView")]),
                screen("contact", [goto("web_help")],
                       [leaf("EditText"), leaf("EditText"), leaf("TextView")],
                       extra=[([0], "type_text", "noop")]),
            ),
        ],
    )


def cycles():
    return app(
        "cycles",
        17,
        "RingActivity",
        [
            activity(
                "RingActivity",
                "ring",
                screen("ring_a", [goto("ring_b"), goto("hub")]),
                screen("ring_b", [goto("ring_c"), goto("ring_a")],
                       [leaf("TextView"), node("FrameLayout", leaf("ImageView"), leaf("ImageView")), leaf("TextView")]),
                screen("ring_c", [goto("ring_a"), "noop"],
                       [node("FrameLayout", leaf("TextView")), leaf("ImageView"), leaf("TextView"), leaf("TextView")]),
            ),
            activity(
                "HubActivity",
                "hub",
                screen("hub", [goto("spoke_1"), goto("spoke_2"), goto("ring_a")],
                       [leaf("ImageView"), leaf("ImageView"), leaf("ImageView"), leaf("TextView")]),
                screen("spoke_1", [goto("hub"), goto("spoke_2")],
                       [node("CardView", leaf("TextView"), leaf("TextView")), leaf("ImageView")]),
                screen("spoke_2", [goto("spoke_1"), goto("hub")],
                       [node("CardView", leaf("ImageView"), leaf("ImageView")), leaf("TextView"), leaf("TextView")]),
            ),
        ],
    )


def deep():
    levels = 12
    activities = []
    for k in range(levels):
        landing_nav = [goto(f"detail_{k}"), goto(f"side_{k}")]
        detail_nav = [goto(f"landing_{k + 1}")] if k + 1 < levels else ["noop"]
        detail_nav.append(goto(f"landing_{k}"))
        activities.append(
            activity(
                f"Level{k}Activity",
                f"level_{k}",
                screen(f"landing_{k}", landing_nav,
                       [leaf("TextView"), node("LinearLayout", *[leaf("ImageView")] * (1 + k % 3)), leaf("TextView")]),
                screen(f"detail_{k}", detail_nav,
                       [node("ScrollView", leaf("TextView"), leaf("TextView")), leaf("ImageView"), leaf("RatingBar")]),
                screen(f"side_{k}", [goto(f"landing_{k}")],
                       [lst("ListView", node("Row", leaf("TextView"), leaf("ImageView"))), leaf("TextView"), leaf("TextView")]),
            )
        )
    return app("deep", 19, "Level0Activity", activities)


def hostile():
    names = ["lobby", "arena", "market", "forge", "vault", "tower", "crypt", "gate"]
    screens = []
    for i, n in enumerate(names):
        nav = [goto(names[(i + 1) % len(names)]), goto(names[(i + 3) % len(names)])]
        screens.append(screen(n, nav, [leaf("TextView"), leaf("ImageView"), node("GridLayout", *[leaf("ImageView")] * (i % 4 + 1)), leaf("ProgressBar")]))
    return app(
        "hostile",
        23,
        "GameActivity",
        [activity("GameActivity", "game", *screens)],
        noise=[
            {"kind": "insert_decoration", "probability": 1.0, "target_path": []},
            {"kind": "permute_children", "probability": 1.0, "target_path": []},
            {"kind": "insert_decoration", "probability": 1.0, "target_path": [1]},
        ],
    )


def shop():
    # 22 screens, 20 reachable; legacy_promo and debug_menu have no inbound links.
    return app(
        "shop",
        29,
        "HomeActivity",
        [
            activity(
                "HomeActivity",
                "home",
                screen("home", [goto("deals"), goto("search"), goto("catalog"), goto("cart"), goto("account")],
                       [node("ViewPager", leaf("ImageView")), leaf("TextView"), lst("RecyclerView", node("ProductCard", leaf("ImageView"), leaf("TextView"))) ]),
                screen("deals", [goto("home"), goto("product")],
                       [lst("RecyclerView", node("DealCard", leaf("ImageView"), leaf("TextView"), leaf("TextView"))), leaf("TextView")]),
                screen("search", [goto("search_results")],
                       [leaf("EditText"), node("ChipGroup", leaf("Chip"), leaf("Chip")), leaf("TextView")],
                       extra=[([0], "type_text", "noop")]),
                screen("search_results", [goto("product"), goto("search")],
                       [lst("RecyclerView", node("ResultCard", leaf("ImageView"), leaf("TextView"))), leaf("Spinner")]),
                screen("legacy_promo", [goto("home")],
                       [leaf("ImageView"), leaf("TextView"), leaf("TextView"), leaf("TextView")]),
            ),
            activity(
                "CatalogActivity",
                "catalog",
                screen("catalog", [goto("category_apparel"), goto("category_electronics"), goto("category_home"), goto("home")],
                       [leaf("TextView"), leaf("ImageView"), leaf("ImageView"), leaf("ImageView")]),
                screen("category_apparel", [goto("product"), goto("catalog")],
                       [lst("GridView", node("Tile", leaf("ImageView"))), leaf("TextView"), leaf("Spinner")]),
                screen("category_electronics", [goto("product"), goto("catalog")],
                       [lst("GridView", node("Tile", leaf("ImageView"), leaf("TextView"))), leaf("TextView"), leaf("Spinner")]),
                screen("category_home", [goto("product"), goto("catalog")],
                       [lst("ListView", node("Tile", leaf("TextView"))), leaf("TextView"), leaf("ImageView")]),
            ),
            activity(
                "ProductActivity",
                "product",
                screen("product", [goto("reviews"), goto("size_guide"), goto("cart")],
                       [node("ViewPager", leaf("ImageView")), leaf("TextView"), leaf("TextView"), leaf("RatingBar")]),
                screen("reviews", [goto("write_review"), goto("product")],
                       [lst("ListView", node("ReviewRow", leaf("RatingBar"), leaf("TextView"))), leaf("TextView")]),
                screen("write_review", [goto("reviews")],
                       [leaf("RatingBar"), leaf("EditText"), leaf("TextView")],
                       extra=[([1], "type_text", "noop"), ([0], "tap", "noop")]),
                screen("size_guide", [goto("product")],
                       [node("TableLayout", leaf("TableRow"), leaf("TableRow"), leaf("TableRow")), leaf("TextView")]),
            ),
            activity(
                "CartActivity",
                "cart",
                screen("cart", [goto("checkout_address"), goto("home")],
                       [lst("ListView", node("CartRow", leaf("ImageView"), leaf("TextView"), leaf("ImageButton"))), leaf("TextView")]),
                screen("checkout_address", [goto("checkout_payment"), goto("cart")],
                       [leaf("EditText"), leaf("EditText"), leaf("EditText"), leaf("CheckBox")],
                       extra=[([0], "type_text", "noop"), ([1], "type_text", "noop")]),
                screen("checkout_payment", [goto("confirmation"), goto("checkout_address")],
                       [leaf("EditText"), leaf("EditText"), node("RadioGroup", leaf("RadioButton"), leaf("RadioButton"))],
                       extra=[([0], "type_text", "noop")]),
                screen("confirmation", [goto("home")],
                       [leaf("ImageView"), leaf("TextView"), leaf("TextView")]),
            ),
            activity(
                "AccountActivity",
                "account",
                screen("account", [goto("orders"), goto("wishlist"), goto("home")],
                       [leaf("ImageView"), leaf("TextView"), node("LinearLayout", leaf("TextView"), leaf("TextView"), leaf("TextView"))]),
                screen("orders", [goto("order_detail"), goto("account")],
                       [lst("ListView", node("OrderRow", leaf("TextView"), leaf("TextView"))), leaf("TextView")]),
                screen("order_detail", [goto("orders")],
                       [leaf("TextView"), leaf("TextView"), node("LinearLayout", leaf("ImageView"), leaf("TextView"))]),
                screen("wishlist", [goto("account")],
                       [lst("GridView", node("WishTile", leaf("ImageView"), leaf("TextView"))), leaf("TextView")]),
                screen("debug_menu", [goto("account"), goto("legacy_promo")],
                       [leaf("Switch"), leaf("Switch"), leaf("TextView"), leaf("TextView")]),
            ),
        ],
    )


def settings():
    return app(
        "settings",
        31,
        "SettingsActivity",
        [
            activity(
                "SettingsActivity",
                "settings",
                screen("root_prefs", [goto("network"), goto("display"), goto("sound"), goto("accounts")],
                       [node("PreferenceCategory", leaf("TextView"), leaf("TextView")), leaf("SearchView")],
                       extra=[([1], "type_text", "noop"), ([0], "scroll", "noop")]),
                screen("network", [goto("wifi"), goto("root_prefs")],
                       [leaf("Switch"), leaf("Switch"), leaf("TextView"), leaf("TextView")],
                       extra=[([0], "tap", "noop"), ([1], "long_tap", "noop")]),
                screen("wifi", [goto("network")],
                       [lst("ListView", node("WifiRow", leaf("ImageView"), leaf("TextView"))), leaf("Switch")],
                       extra=[([0, 0], "long_tap", "noop"), ([0], "scroll", "noop")]),
                screen("display", [goto("root_prefs")],
                       [leaf("SeekBar"), leaf("Switch"), leaf("Spinner"), leaf("TextView")],
                       extra=[([0], "scroll", "noop"), ([2], "tap", "noop")]),
                screen("sound", [goto("root_prefs")],
                       [leaf("SeekBar"), leaf("SeekBar"), leaf("SeekBar"), leaf("Switch")]),
            ),
            activity(
                "AccountsActivity",
                "accounts",
                screen("accounts", [goto("add_account"), goto("root_prefs")],
                       [lst("ListView", node("AccountRow", leaf("ImageView"), leaf("TextView"), leaf("TextView"))), leaf("TextView")]),
                screen("add_account", [goto("account_login"), goto("accounts")],
                       [lst("ListView", node("ProviderRow", leaf("ImageView"), leaf("TextView"))), leaf("TextView")]),
                screen("account_login", [goto("accounts")],
                       [leaf("EditText"), leaf("EditText"), leaf("CheckBox"), leaf("TextView")],
                       extra=[([0], "type_text", "noop"), ([1], "type_text", "noop"), ([2], "tap", "noop")]),
            ),
        ],
    )


def social():
    # Five activities of ten screens each; a 3-ary tree inside each activity,
    # every screen links home to its landing, and landings link across.
    sections = ["feed", "friends", "groups", "messages", "events"]
    activities = []
    for si, sec in enumerate(sections):
        ids = [f"{sec}_{i}" for i in range(10)]
        screens = []
        for i, sid in enumerate(ids):
            kids = [3 * i + 1, 3 * i + 2, 3 * i + 3]
            nav = [goto(ids[k]) for k in kids if k < 10]
            if i == 0:
                nav.append(goto(f"{sections[(si + 1) % 5]}_0"))
                if si == 0:
                    nav.append(goto(f"{sections[2]}_0"))
            else:
                nav.append(goto(ids[0]))
            body = [
                leaf("TextView"),
                node("LinearLayout", *[leaf("ImageView")] * (1 + i % 3)),
                lst("RecyclerView", node(f"{sec.capitalize()}Item", leaf("TextView"), leaf("ImageView"))) if i % 2 else leaf("TextView"),
            ]
            screens.append(screen(sid, nav, body))
        activities.append(activity(f"{sec.capitalize()}Activity", sec, *screens))
    return app("social", 37, "FeedActivity", activities)


APPS = [newsreader, profile, flaky, webmail, cycles, deep, hostile, shop, settings, social]


def main():
    for make in APPS:
        spec = make()
        path = os.path.join(HERE, f"{spec['name']}.json")
        with open(path, "w") as f:
            json.dump(spec, f, indent=2)
            f.write("\n")
        screens = sum(len(a["screens"]) for a in spec["activities"])
        print(f"{spec['name']}: {screens} screens")


if __name__ == "__main__":
    main()
