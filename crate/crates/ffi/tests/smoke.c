#include <stdio.h>
#include "flrank.h"

int main(int argc, char **argv) {
    if (argc != 2) {
        fprintf(stderr, "usage: smoke <bundle-dir>\n");
        return 2;
    }
    FlBundle *bundle = NULL;
    if (fl_bundle_load(argv[1], &bundle) != FL_STATUS_OK) {
        fprintf(stderr, "load: %s\n", fl_last_error_message());
        return 1;
    }
    FlRankedList *list = NULL;
    FlStatus st = fl_rank_sbir(bundle, 1, &list);
    if (st != FL_STATUS_OK) {
        fprintf(stderr, "sbir (%d): %s\n", (int)st, fl_last_error_message());
        fl_bundle_free(bundle);
        return 1;
    }
    printf("%s: %zu statements ranked, top %s, bug at rank %zu\n", fl_version(),
           fl_ranked_list_len(list), fl_ranked_list_item(list, 0),
           fl_ranked_list_rank_of(list, "Account.java:29:0"));
    fl_ranked_list_free(list);
    fl_bundle_free(bundle);
    return 0;
}
